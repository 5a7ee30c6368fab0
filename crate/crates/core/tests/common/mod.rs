//! Oracles that share no code path with the library's numerical engines.
//!
//! * `exact`: commutant dimensions by Gaussian elimination over Q(i).
//! * `charpoly`: distinct eigenvalue counts from the characteristic
//!   polynomial via Sturm sequences.
//! * `fixtures`: the integer-entry matrix sets the exact oracle runs on.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod exact {
    use num::{BigInt, BigRational, ToPrimitive, Zero};
    use num_complex::Complex64;

    /// Gaussian rational `re + i im`.
    #[derive(Clone, Debug, PartialEq)]
    pub struct Gq {
        re: BigRational,
        im: BigRational,
    }

    impl Gq {
        pub fn int(re: i64, im: i64) -> Self {
            Self {
                re: BigRational::from_integer(BigInt::from(re)),
                im: BigRational::from_integer(BigInt::from(im)),
            }
        }

        pub fn zero() -> Self {
            Self::int(0, 0)
        }

        pub fn is_zero(&self) -> bool {
            self.re.is_zero() && self.im.is_zero()
        }

        pub fn add(&self, o: &Self) -> Self {
            Self {
                re: &self.re + &o.re,
                im: &self.im + &o.im,
            }
        }

        pub fn sub(&self, o: &Self) -> Self {
            Self {
                re: &self.re - &o.re,
                im: &self.im - &o.im,
            }
        }

        pub fn mul(&self, o: &Self) -> Self {
            Self {
                re: &self.re * &o.re - &self.im * &o.im,
                im: &self.re * &o.im + &self.im * &o.re,
            }
        }

        pub fn conj(&self) -> Self {
            Self {
                re: self.re.clone(),
                im: -&self.im,
            }
        }

        pub fn half(&self) -> Self {
            let two = BigRational::from_integer(BigInt::from(2));
            Self {
                re: &self.re / &two,
                im: &self.im / &two,
            }
        }

        pub fn inv(&self) -> Self {
            let d = &self.re * &self.re + &self.im * &self.im;
            assert!(!d.is_zero());
            Self {
                re: &self.re / &d,
                im: -&self.im / &d,
            }
        }

        pub fn to_c64(&self) -> Complex64 {
            Complex64::new(self.re.to_f64().unwrap(), self.im.to_f64().unwrap())
        }
    }

    pub type QMat = Vec<Vec<Gq>>;

    pub fn from_ints(rows: &[&[(i64, i64)]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&(a, b)| Gq::int(a, b)).collect()).collect()
    }

    pub fn matmul(a: &QMat, b: &QMat) -> QMat {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(Gq::zero(), |acc, k| acc.add(&a[i][k].mul(&b[k][j]))))
                    .collect()
            })
            .collect()
    }

    pub fn adjoint(a: &QMat) -> QMat {
        let n = a.len();
        (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
    }

    pub fn conj(a: &QMat) -> QMat {
        a.iter().map(|r| r.iter().map(Gq::conj).collect()).collect()
    }

    pub fn add(a: &QMat, b: &QMat) -> QMat {
        a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.add(q)).collect()).collect()
    }

    pub fn half(a: &QMat) -> QMat {
        a.iter().map(|r| r.iter().map(Gq::half).collect()).collect()
    }

    /// Rank and a nullspace basis of a `rows x ncols` matrix, by reduced row
    /// echelon form.
    pub fn rank_and_nullspace(mut rows: Vec<Vec<Gq>>, ncols: usize) -> (usize, Vec<Vec<Gq>>) {
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        for col in 0..ncols {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][col].inv();
            rows[r] = rows[r].iter().map(|x| x.mul(&inv)).collect();
            for i in 0..rows.len() {
                if i != r && !rows[i][col].is_zero() {
                    let f = rows[i][col].clone();
                    let pivot_row = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                        *x = x.sub(&f.mul(y));
                    }
                }
            }
            pivots.push(col);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let mut null = Vec::new();
        for free in (0..ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Gq::zero(); ncols];
            v[free] = Gq::int(1, 0);
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = Gq::zero().sub(&rows[k][free]);
            }
            null.push(v);
        }
        (pivots.len(), null)
    }

    /// Rows of the linear map `X -> A X - X A` for every generator, with
    /// unknowns `X[i][j]` numbered `i * n + j`.
    fn commutator_rows(gens: &[QMat]) -> Vec<Vec<Gq>> {
        let n = gens[0].len();
        let mut rows = Vec::new();
        for a in gens {
            for i in 0..n {
                for j in 0..n {
                    // (AX - XA)_{ij} = sum_k A_ik X_kj - X_ik A_kj
                    let mut row = vec![Gq::zero(); n * n];
                    for k in 0..n {
                        row[k * n + j] = row[k * n + j].add(&a[i][k]);
                        row[i * n + k] = row[i * n + k].sub(&a[k][j]);
                    }
                    rows.push(row);
                }
            }
        }
        rows
    }

    pub fn commutant(gens: &[QMat]) -> Vec<QMat> {
        let n = gens[0].len();
        let (_, null) = rank_and_nullspace(commutator_rows(gens), n * n);
        null.into_iter()
            .map(|v| (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect())
            .collect()
    }

    /// `(dim {A}', dim {A}'')`.
    pub fn commutant_dims(gens: &[QMat]) -> (usize, usize) {
        let first = commutant(gens);
        let second = commutant(&first);
        (first.len(), second.len())
    }
}

pub mod charpoly {
    use kramers_lab::ComplexMatrix;
    use num_complex::Complex64;

    /// Coefficients `c_0..=c_n` of `det(x I - A)` by Faddeev–LeVerrier.
    pub fn characteristic(a: &ComplexMatrix) -> Vec<f64> {
        let n = a.dim();
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        let id = ComplexMatrix::identity(n);
        let mut m = ComplexMatrix::zeros(n);
        for k in 1..=n {
            m = &(a * &m) + &id.scale(c[n - k + 1]);
            c[n - k] = -(a * &m).trace() / k as f64;
        }
        c.iter().map(|z| z.re).collect()
    }

    fn trim(mut p: Vec<f64>, tol: f64) -> Vec<f64> {
        while p.len() > 1 && p.last().unwrap().abs() <= tol {
            p.pop();
        }
        p
    }

    fn eval(p: &[f64], x: f64) -> f64 {
        p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn derivative(p: &[f64]) -> Vec<f64> {
        p.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect()
    }

    fn remainder(num: &[f64], den: &[f64]) -> Vec<f64> {
        let mut r = num.to_vec();
        let d = den.len() - 1;
        while r.len() > d {
            let shift = r.len() - 1 - d;
            let f = r.last().unwrap() / den.last().unwrap();
            for (k, &c) in den.iter().enumerate() {
                r[k + shift] -= f * c;
            }
            r.pop();
        }
        r
    }

    pub fn sturm_chain(p: &[f64]) -> Vec<Vec<f64>> {
        let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        let tol = 1e-9 * scale;
        let mut chain = vec![p.to_vec(), derivative(p)];
        while chain.last().unwrap().len() > 1 {
            let n = chain.len();
            let r = trim(remainder(&chain[n - 2], &chain[n - 1]), tol);
            if r.is_empty() || (r.len() == 1 && r[0].abs() <= tol) {
                break;
            }
            chain.push(r.iter().map(|c| -c).collect());
        }
        chain
    }

    fn sign_changes(chain: &[Vec<f64>], x: f64) -> usize {
        let signs: Vec<f64> = chain.iter().map(|q| eval(q, x)).filter(|v| *v != 0.0).collect();
        signs.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
    }

    fn root_bound(p: &[f64]) -> f64 {
        let lead = p.last().unwrap().abs();
        1.0 + p[..p.len() - 1].iter().fold(0.0f64, |m, c| m.max(c.abs() / lead))
    }

    /// Distinct real roots of `p`, located by Sturm bisection.
    pub fn distinct_real_roots(p: &[f64]) -> Vec<f64> {
        let chain = sturm_chain(p);
        let b = root_bound(p);
        let mut roots = Vec::new();
        let mut stack = vec![(-b, b)];
        while let Some((lo, hi)) = stack.pop() {
            let count = sign_changes(&chain, lo) - sign_changes(&chain, hi);
            if count == 0 {
                continue;
            }
            if count == 1 && hi - lo < 1e-11 {
                roots.push(0.5 * (lo + hi));
                continue;
            }
            if hi - lo < 1e-14 {
                roots.push(0.5 * (lo + hi));
                continue;
            }
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
        roots.sort_by(f64::total_cmp);
        roots
    }
}

pub mod fixtures {
    use super::exact::{self, Gq, QMat};
    use kramers_lab::{Complex64, ComplexMatrix};

    /// splitmix64, kept local so fixtures do not depend on the library RNG.
    pub struct SplitMix(u64);

    impl SplitMix {
        pub fn new(seed: u64) -> Self {
            Self(seed)
        }

        pub fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        }

        /// Uniform integer in `lo..=hi`.
        pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.next() % (hi - lo + 1) as u64) as i64
        }
    }

    pub fn to_matrix(q: &QMat) -> ComplexMatrix {
        let rows: Vec<Vec<Complex64>> = q.iter().map(|r| r.iter().map(Gq::to_c64).collect()).collect();
        ComplexMatrix::from_rows(&rows).unwrap()
    }

    fn random_hermitian(n: usize, rng: &mut SplitMix) -> QMat {
        let mut m = vec![vec![Gq::zero(); n]; n];
        for i in 0..n {
            m[i][i] = Gq::int(rng.int(-3, 3), 0);
            for j in i + 1..n {
                let z = Gq::int(rng.int(-2, 2), rng.int(-2, 2));
                m[j][i] = z.conj();
                m[i][j] = z;
            }
        }
        m
    }

    fn random_real_symmetric(n: usize, rng: &mut SplitMix) -> QMat {
        let mut m = vec![vec![Gq::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let z = Gq::int(rng.int(-3, 3), 0);
                m[i][j] = z.clone();
                m[j][i] = z;
            }
        }
        m
    }

    fn diagonal(values: &[i64]) -> QMat {
        let n = values.len();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { Gq::int(values[i], 0) } else { Gq::zero() }).collect())
            .collect()
    }

    /// Signed permutation `P` with random phases in {1, i, -1, -i}.
    fn monomial_unitary(n: usize, rng: &mut SplitMix) -> QMat {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.int(0, i as i64) as usize);
        }
        let phases = [(1, 0), (0, 1), (-1, 0), (0, -1)];
        let mut m = vec![vec![Gq::zero(); n]; n];
        for (i, &p) in perm.iter().enumerate() {
            let (a, b) = phases[rng.int(0, 3) as usize];
            m[i][p] = Gq::int(a, b);
        }
        m
    }

    /// `I_k (x) sigma_2`.
    fn block_sigma2(n: usize) -> QMat {
        let mut m = vec![vec![Gq::zero(); n]; n];
        for b in 0..n / 2 {
            m[2 * b][2 * b + 1] = Gq::int(0, -1);
            m[2 * b + 1][2 * b] = Gq::int(0, 1);
        }
        m
    }

    fn pauli() -> [QMat; 3] {
        [
            exact::from_ints(&[&[(0, 0), (1, 0)], &[(1, 0), (0, 0)]]),
            exact::from_ints(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]]),
            exact::from_ints(&[&[(1, 0), (0, 0)], &[(0, 0), (-1, 0)]]),
        ]
    }

    fn kron(a: &QMat, b: &QMat) -> QMat {
        let (n, m) = (a.len(), b.len());
        (0..n * m)
            .map(|i| (0..n * m).map(|j| a[i / m][j / m].mul(&b[i % m][j % m])).collect())
            .collect()
    }

    fn identity(n: usize) -> QMat {
        diagonal(&vec![1; n])
    }

    pub struct Fixture {
        pub label: String,
        pub generators: Vec<QMat>,
    }

    /// The 50 rational fixture sets (sizes 1 to 4).
    pub fn rational_cases() -> Vec<Fixture> {
        let mut rng = SplitMix::new(0x05ee_d0f0_ac1e);
        let mut out = Vec::new();
        let mut push = |label: String, generators: Vec<QMat>| out.push(Fixture { label, generators });

        for k in 0..12 {
            let n = 1 + k % 4;
            push(format!("hermitian n={n} #{k}"), vec![random_hermitian(n, &mut rng)]);
        }
        let profiles: [&[i64]; 10] = [
            &[1, 1],
            &[2, 2, 5],
            &[-1, 3, -1],
            &[4, 4, 4],
            &[0, 0, 1, 1],
            &[2, 2, 2, -3],
            &[1, 2, 3, 4],
            &[7, -7, 7, -7],
            &[1, 1, 1, 2],
            &[5, 5],
        ];
        for (k, values) in profiles.iter().enumerate() {
            let p = monomial_unitary(values.len(), &mut rng);
            let h = matmul3(&p, &diagonal(values), &exact::adjoint(&p));
            push(format!("planted #{k} {values:?}"), vec![h]);
        }
        for k in 0..8 {
            let n = if k % 2 == 0 { 4 } else { 2 };
            let h0 = random_hermitian(n, &mut rng);
            let m = block_sigma2(n);
            let mirrored = matmul3(&m, &exact::conj(&h0), &exact::adjoint(&m));
            push(format!("fermionic n={n} #{k}"), vec![exact::half(&exact::add(&h0, &mirrored))]);
        }
        for k in 0..6 {
            let n = 2 + k % 3;
            push(format!("real symmetric n={n} #{k}"), vec![random_real_symmetric(n, &mut rng)]);
        }
        let [s1, s2, s3] = pauli();
        let i2 = identity(2);
        push("pauli {s1, s3}".into(), vec![s1.clone(), s3.clone()]);
        push("pauli {s1, s2, s3}".into(), vec![s1.clone(), s2.clone(), s3.clone()]);
        push("slot-0 spins".into(), vec![kron(&s1, &i2), kron(&s2, &i2), kron(&s3, &i2)]);
        push("z on both slots".into(), vec![kron(&s3, &i2), kron(&i2, &s3)]);
        push("two-slot spins".into(), vec![kron(&s1, &i2), kron(&i2, &s2), kron(&s3, &i2), kron(&i2, &s3)]);
        push("s2 (x) s2".into(), vec![kron(&s2, &s2)]);
        push("jordan 2".into(), vec![exact::from_ints(&[&[(1, 0), (1, 0)], &[(0, 0), (1, 0)]])]);
        push(
            "jordan 3".into(),
            vec![exact::from_ints(&[
                &[(2, 0), (1, 0), (0, 0)],
                &[(0, 0), (2, 0), (1, 0)],
                &[(0, 0), (0, 0), (2, 0)],
            ])],
        );
        push(
            "jordan 2 + 1".into(),
            vec![exact::from_ints(&[
                &[(0, 0), (1, 0), (0, 0)],
                &[(0, 0), (0, 0), (0, 0)],
                &[(0, 0), (0, 0), (0, 0)],
            ])],
        );
        push(
            "upper triangular".into(),
            vec![exact::from_ints(&[
                &[(1, 0), (2, 1), (0, 0), (1, 0)],
                &[(0, 0), (1, 0), (0, 0), (0, 0)],
                &[(0, 0), (0, 0), (3, 0), (1, 0)],
                &[(0, 0), (0, 0), (0, 0), (3, 0)],
            ])],
        );
        push("zero n=3".into(), vec![vec![vec![Gq::zero(); 3]; 3]]);
        push("identity n=4".into(), vec![identity(4)]);
        push("scalar 2i n=2".into(), vec![diagonal(&[2, 2]).iter().map(|r| r.iter().map(|x| x.mul(&Gq::int(0, 1))).collect()).collect()]);
        push("1x1".into(), vec![diagonal(&[5])]);
        out
    }

    fn matmul3(a: &QMat, b: &QMat, c: &QMat) -> QMat {
        exact::matmul(&exact::matmul(a, b), c)
    }
}
