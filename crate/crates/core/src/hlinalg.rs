//! Vectors and 3×3 matrices over [`FieldElem`], the signature-(2,1) Hermitian
//! form of the Siegel model, exact kernels and in-field eigenvectors.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{FieldElem, QRat};

/// A vector of `C³` with entries in the field; usually a lift of a projective point.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec3F(pub [FieldElem; 3]);

impl Vec3F {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem) -> Self {
        Vec3F([a, b, c])
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Self {
        Vec3F([a.into(), b.into(), c.into()])
    }

    pub fn zero() -> Self {
        Vec3F::from_ints(0, 0, 0)
    }

    pub fn e(k: usize) -> Self {
        let mut v = Vec3F::zero();
        v.0[k] = FieldElem::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldElem::is_zero)
    }

    pub fn scale(&self, s: &FieldElem) -> Self {
        Vec3F(std::array::from_fn(|k| &self.0[k] * s))
    }

    pub fn conj(&self) -> Self {
        Vec3F(std::array::from_fn(|k| self.0[k].conj()))
    }

    /// True when `self` and `other` span the same complex line (all 2×2 minors vanish).
    pub fn is_proportional(&self, other: &Vec3F) -> bool {
        let (a, b) = (&self.0, &other.0);
        (0..3).all(|i| {
            (i + 1..3).all(|j| (&a[i] * &b[j]) == (&a[j] * &b[i]))
        })
    }

    /// Scalar `λ` with `other = λ · self`, when the two are proportional.
    pub fn ratio_to(&self, other: &Vec3F) -> Option<FieldElem> {
        if !self.is_proportional(other) {
            return None;
        }
        let k = (0..3).find(|&k| !self.0[k].is_zero())?;
        other.0[k].checked_div(&self.0[k]).ok()
    }

    pub fn to_complex_float(&self) -> [num_complex::Complex64; 3] {
        std::array::from_fn(|k| self.0[k].to_complex_float())
    }

    /// Divides by the first nonzero coordinate so proportional vectors compare equal.
    pub fn normalized(&self) -> Self {
        match self.0.iter().find(|c| !c.is_zero()) {
            Some(p) => self.scale(&p.inv().expect("nonzero pivot")),
            None => self.clone(),
        }
    }
}

impl Index<usize> for Vec3F {
    type Output = FieldElem;

    fn index(&self, k: usize) -> &FieldElem {
        &self.0[k]
    }
}

impl fmt::Debug for Vec3F {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for &Vec3F {
    type Output = Vec3F;

    fn add(self, rhs: &Vec3F) -> Vec3F {
        Vec3F(std::array::from_fn(|k| &self.0[k] + &rhs.0[k]))
    }
}

impl Sub for &Vec3F {
    type Output = Vec3F;

    fn sub(self, rhs: &Vec3F) -> Vec3F {
        Vec3F(std::array::from_fn(|k| &self.0[k] - &rhs.0[k]))
    }
}

impl Neg for &Vec3F {
    type Output = Vec3F;

    fn neg(self) -> Vec3F {
        Vec3F(std::array::from_fn(|k| -&self.0[k]))
    }
}

/// The Hermitian product `⟨z, w⟩ = z̄₁w₃ + z̄₂w₂ + z̄₃w₁`.
pub fn herm(z: &Vec3F, w: &Vec3F) -> FieldElem {
    let a = &z.0[0].conj() * &w.0[2];
    let b = &z.0[1].conj() * &w.0[1];
    let c = &z.0[2].conj() * &w.0[0];
    &(&a + &b) + &c
}

/// `⟨z, z⟩`, always real.
pub fn norm2(z: &Vec3F) -> FieldElem {
    herm(z, z)
}

/// The fixed antidiagonal form `Φ` of signature (2,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermForm;

impl HermForm {
    pub fn matrix(&self) -> Mat3F {
        Mat3F::from_ints([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    }

    pub fn eval(&self, z: &Vec3F, w: &Vec3F) -> FieldElem {
        herm(z, w)
    }
}

/// A 3×3 matrix over the field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat3F(pub [[FieldElem; 3]; 3]);

impl Mat3F {
    pub fn from_fn(f: impl Fn(usize, usize) -> FieldElem) -> Self {
        Mat3F(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn from_ints(rows: [[i64; 3]; 3]) -> Self {
        Mat3F::from_fn(|i, j| rows[i][j].into())
    }

    pub fn identity() -> Self {
        Mat3F::from_fn(|i, j| if i == j { FieldElem::one() } else { FieldElem::zero() })
    }

    pub fn zero() -> Self {
        Mat3F::from_fn(|_, _| FieldElem::zero())
    }

    pub fn diag(a: FieldElem, b: FieldElem, c: FieldElem) -> Self {
        let d = [a, b, c];
        Mat3F::from_fn(|i, j| if i == j { d[i].clone() } else { FieldElem::zero() })
    }

    pub fn from_columns(c: [&Vec3F; 3]) -> Self {
        Mat3F::from_fn(|i, j| c[j].0[i].clone())
    }

    pub fn column(&self, j: usize) -> Vec3F {
        Vec3F(std::array::from_fn(|i| self.0[i][j].clone()))
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat3F::identity()
    }

    /// True when the matrix is a scalar multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        let d = &self.0[0][0];
        (0..3).all(|i| (0..3).all(|j| if i == j { &self.0[i][j] == d } else { self.0[i][j].is_zero() }))
    }

    pub fn scale(&self, s: &FieldElem) -> Self {
        Mat3F::from_fn(|i, j| &self.0[i][j] * s)
    }

    pub fn apply(&self, v: &Vec3F) -> Vec3F {
        Vec3F(std::array::from_fn(|i| {
            let r = &self.0[i];
            &(&(&r[0] * &v.0[0]) + &(&r[1] * &v.0[1])) + &(&r[2] * &v.0[2])
        }))
    }

    pub fn transpose(&self) -> Self {
        Mat3F::from_fn(|i, j| self.0[j][i].clone())
    }

    /// Conjugate transpose `M*`.
    pub fn conj_transpose(&self) -> Self {
        Mat3F::from_fn(|i, j| self.0[j][i].conj())
    }

    /// The adjoint with respect to `Φ`: `Φ M* Φ`. Equals `M⁻¹` when `M ∈ U(2,1)`.
    pub fn adjoint_wrt_form(&self) -> Self {
        // Φ permutes rows and columns by k ↦ 2 - k.
        Mat3F::from_fn(|i, j| self.0[2 - j][2 - i].conj())
    }

    pub fn trace(&self) -> FieldElem {
        &(&self.0[0][0] + &self.0[1][1]) + &self.0[2][2]
    }

    fn minor(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> FieldElem {
        &(&self.0[r0][c0] * &self.0[r1][c1]) - &(&self.0[r0][c1] * &self.0[r1][c0])
    }

    pub fn det(&self) -> FieldElem {
        let m = &self.0;
        let a = &m[0][0] * &self.minor(1, 2, 1, 2);
        let b = &m[0][1] * &self.minor(1, 2, 0, 2);
        let c = &m[0][2] * &self.minor(1, 2, 0, 1);
        &(&a - &b) + &c
    }

    /// Classical adjugate, so that `M · adj(M) = det(M) · I`.
    pub fn adjugate(&self) -> Self {
        let others = |k: usize| match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        Mat3F::from_fn(|i, j| {
            // Cofactor of entry (j, i).
            let (r0, r1) = others(j);
            let (c0, c1) = others(i);
            let m = self.minor(r0, r1, c0, c1);
            if (i + j) % 2 == 0 {
                m
            } else {
                -&m
            }
        })
    }

    pub fn inv(&self) -> Result<Self> {
        let d = self.det();
        if d.is_zero() {
            return Err(Error::Singular);
        }
        Ok(self.adjugate().scale(&d.inv()?))
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Mat3F::identity();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            n >>= 1;
            if n > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// `M*ΦM = Φ` and `det M = 1`.
    pub fn is_su21(&self) -> bool {
        self.is_u21() && self.det().is_one()
    }

    /// `M*ΦM = Φ`.
    pub fn is_u21(&self) -> bool {
        (&self.adjoint_wrt_form() * self).is_identity()
    }

    /// `[x³, x², x, 1]`-coefficients of the monic characteristic polynomial
    /// `x³ + c₂x² + c₁x + c₀`, returned as `[c₀, c₁, c₂]`.
    pub fn charpoly(&self) -> [FieldElem; 3] {
        let tr = self.trace();
        let principal = &(&self.minor(0, 1, 0, 1) + &self.minor(0, 2, 0, 2)) + &self.minor(1, 2, 1, 2);
        [-&self.det(), principal, -&tr]
    }

    pub fn to_strings(&self) -> Vec<[String; 8]> {
        self.0.iter().flatten().map(FieldElem::to_strings).collect()
    }

    /// Canonical text: nine entries separated by `;`, each as eight `p/q` strings.
    pub fn canonical_string(&self) -> String {
        self.0
            .iter()
            .flatten()
            .map(FieldElem::canonical_string)
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_complex_float(&self) -> [[num_complex::Complex64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].to_complex_float()))
    }
}

impl Index<(usize, usize)> for Mat3F {
    type Output = FieldElem;

    fn index(&self, (i, j): (usize, usize)) -> &FieldElem {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3F {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElem {
        &mut self.0[i][j]
    }
}

impl fmt::Debug for Mat3F {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.0 {
            writeln!(f, "  [{}, {}, {}]", r[0], r[1], r[2])?;
        }
        write!(f, "]")
    }
}

impl Mul for &Mat3F {
    type Output = Mat3F;

    fn mul(self, rhs: &Mat3F) -> Mat3F {
        Mat3F::from_fn(|i, j| {
            let a = &self.0[i];
            &(&(&a[0] * &rhs.0[0][j]) + &(&a[1] * &rhs.0[1][j])) + &(&a[2] * &rhs.0[2][j])
        })
    }
}

impl Mul for Mat3F {
    type Output = Mat3F;

    fn mul(self, rhs: Mat3F) -> Mat3F {
        &self * &rhs
    }
}

impl Sub for &Mat3F {
    type Output = Mat3F;

    fn sub(self, rhs: &Mat3F) -> Mat3F {
        Mat3F::from_fn(|i, j| &self.0[i][j] - &rhs.0[i][j])
    }
}

impl Add for &Mat3F {
    type Output = Mat3F;

    fn add(self, rhs: &Mat3F) -> Mat3F {
        Mat3F::from_fn(|i, j| &self.0[i][j] + &rhs.0[i][j])
    }
}

/// Null space basis by Gaussian elimination with first-nonzero pivoting.
pub fn kernel(m: &Mat3F) -> Vec<Vec3F> {
    let mut rows: Vec<[FieldElem; 3]> = m.0.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..3 {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("pivot is nonzero");
        rows[r] = std::array::from_fn(|k| &rows[r][k] * &inv);
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                rows[i] = std::array::from_fn(|k| &rows[i][k] - &(&f * &rows[r][k]));
            }
        }
        pivots.push(col);
        r += 1;
    }
    (0..3)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = Vec3F::zero();
            v.0[free] = FieldElem::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v.0[pc] = -&rows[i][free];
            }
            v
        })
        .collect()
}

/// Solves `M x = b` for invertible `M`.
pub fn solve(m: &Mat3F, b: &Vec3F) -> Result<Vec3F> {
    Ok(m.inv()?.apply(b))
}

/// The twelve 12th roots of unity, all of which lie in the field.
pub fn twelfth_roots_of_unity() -> Vec<FieldElem> {
    let half = |c: [i64; 8]| FieldElem::from_int_coords(c, 2).expect("nonzero denominator");
    let mut roots = vec![
        FieldElem::one(),
        half([0, 0, 1, 0, 1, 0, 0, 0]), // (√3 + i)/2
        FieldElem::zeta(),
        FieldElem::i(),
        FieldElem::omega(),
        half([0, 0, -1, 0, 1, 0, 0, 0]), // (-√3 + i)/2
    ];
    let negs: Vec<_> = roots.iter().map(|r| -r).collect();
    roots.extend(negs);
    roots
}

/// The sixth roots of unity `ζ^k`, `k = 0..6`.
pub fn sixth_roots_of_unity() -> Vec<FieldElem> {
    let z = FieldElem::zeta();
    (0..6).map(|k| z.pow(k)).collect()
}

/// Eigen-data of a matrix restricted to eigenvalues in the field.
#[derive(Clone, Debug)]
pub struct EigenData {
    /// Distinct eigenvalues with algebraic multiplicity and an eigenspace basis.
    pub eigenspaces: Vec<Eigenspace>,
    /// False when some root of the characteristic polynomial is outside the field.
    pub complete: bool,
}

#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub value: FieldElem,
    pub multiplicity: usize,
    pub vectors: Vec<Vec3F>,
}

impl EigenData {
    /// Flattened `(λ, v)` pairs, one per eigenspace basis vector.
    pub fn pairs(&self) -> Vec<(FieldElem, Vec3F)> {
        self.eigenspaces
            .iter()
            .flat_map(|e| e.vectors.iter().map(|v| (e.value.clone(), v.clone())))
            .collect()
    }
}

fn eval_monic_cubic(c: &[FieldElem; 3], x: &FieldElem) -> FieldElem {
    // ((x + c₂)x + c₁)x + c₀
    let t = x + &c[2];
    let t = &(&t * x) + &c[1];
    &(&t * x) + &c[0]
}

/// Rational roots of a monic cubic with rational coefficients, by the rational root theorem.
fn rational_root_candidates(c: &[FieldElem; 3]) -> Vec<FieldElem> {
    let Some(q) = c.iter().map(FieldElem::as_rational).collect::<Option<Vec<QRat>>>() else {
        return Vec::new();
    };
    let l = q.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denominator()));
    let ints: Vec<BigInt> = q.iter().map(|r| r.numerator() * (&l / r.denominator())).collect();
    // l x³ + i₂ x² + i₁ x + i₀ = 0 ⇒ roots p/r with p | i₀, r | l.
    let Some(k0) = ints[0].abs().to_u64() else { return Vec::new() };
    let Some(lead) = l.to_u64() else { return Vec::new() };
    if k0 == 0 {
        return vec![FieldElem::zero()];
    }
    let divisors = |n: u64| -> Vec<u64> {
        if n > 1_000_000_000_000 {
            return Vec::new();
        }
        let mut d = Vec::new();
        let mut k = 1;
        while k * k <= n {
            if n % k == 0 {
                d.push(k);
                if k * k != n {
                    d.push(n / k);
                }
            }
            k += 1;
        }
        d
    };
    let mut out = Vec::new();
    for p in divisors(k0) {
        for r in divisors(lead) {
            for s in [1i64, -1] {
                let cand = FieldElem::from_frac(s * p as i64, r as i64).expect("nonzero");
                if !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out
}

/// Eigenvalues in the field and their eigenvectors.
///
/// A first root is searched among the 12th roots of unity and the rational
/// roots of the characteristic polynomial. The remaining quadratic factor is
/// solved when its discriminant is a square in the field.
pub fn eigen_in_field(m: &Mat3F) -> EigenData {
    let c = m.charpoly();
    let mut candidates = twelfth_roots_of_unity();
    candidates.extend(rational_root_candidates(&c));
    let first = candidates
        .into_iter()
        .find(|x| eval_monic_cubic(&c, x).is_zero());

    let mut roots: Vec<FieldElem> = Vec::new();
    let mut complete = false;
    if let Some(l) = first {
        // x³ + c₂x² + c₁x + c₀ = (x - λ)(x² + px + q)
        let p = &c[2] + &l;
        let q = &c[1] + &(&l * &p);
        let disc = &(&p * &p) - &q.scale_int(4);
        roots.push(l);
        if let Some(s) = disc.sqrt() {
            let half = QRat::new(BigInt::one(), BigInt::from(2)).expect("nonzero");
            roots.push((&(-&p) + &s).scale(&half));
            roots.push((&(-&p) - &s).scale(&half));
            complete = true;
        }
    }

    let mut eigenspaces: Vec<Eigenspace> = Vec::new();
    for r in roots {
        if let Some(e) = eigenspaces.iter_mut().find(|e| e.value == r) {
            e.multiplicity += 1;
            continue;
        }
        let shifted = m - &Mat3F::identity().scale(&r);
        eigenspaces.push(Eigenspace {
            vectors: kernel(&shifted),
            value: r,
            multiplicity: 1,
        });
    }
    EigenData {
        eigenspaces,
        complete,
    }
}

/// Sign of a real field element as `-1`, `0`, `+1`.
pub fn sign_int(x: &FieldElem) -> Result<i8> {
    Ok(match x.sign_of_real()? {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    })
}
