//! The invariant R-circle `R₀` of Γ′, point clouds of the limit set, R-circle
//! chains and the lemniscate `π(R₀)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cxhyp::{float_chart, float_heisenberg, HeisenbergCoord, ProjPoint, RCircleParam};
use crate::error::{Error, Result};
use crate::group::{eval_str, orbit_bfs, Constants, Gen, GroupElem, GroupWord, VerifyReport};
use crate::hlinalg::{herm, kernel, norm2, sign_int, Mat3F, Vec3F};
use crate::qfield::{FieldElem, QRat};

/// The basis `q₁ = p_B`, `q₂ = B₁p_B`, `q₃ = B₁⁻¹p_B` of the real plane of `R₀`.
#[derive(Clone, Debug)]
pub struct R0Basis {
    pub param: RCircleParam,
}

impl R0Basis {
    pub fn new() -> Self {
        Self::from_constants(Constants::get()).expect("R₀ data of the shipped constants")
    }

    pub fn from_constants(k: &Constants) -> Result<Self> {
        let b1_inv = k.b1.inv()?;
        let param = RCircleParam::new(k.p_b.clone(), k.b1.apply(&k.p_b), b1_inv.apply(&k.p_b))?;
        Ok(R0Basis { param })
    }

    pub fn q(&self, i: usize) -> &Vec3F {
        &self.param.q[i]
    }

    pub fn gram(&self) -> Mat3F {
        self.param.gram()
    }

    /// Exact lift `Σ xᵢqᵢ`.
    pub fn lift(&self, x: &[QRat; 3]) -> Vec3F {
        combine_rational(&self.param.q, x)
    }
}

impl Default for R0Basis {
    fn default() -> Self {
        Self::new()
    }
}

fn combine_rational(q: &[Vec3F; 3], x: &[QRat; 3]) -> Vec3F {
    let mut acc = Vec3F::zero();
    for (v, c) in q.iter().zip(x) {
        if !c.is_zero() {
            acc = &acc + &Vec3F(std::array::from_fn(|k| v.0[k].scale(c)));
        }
    }
    acc
}

/// Integer coefficients `[c₁₂, c₁₃, c₂₃]` of `x₁x₂`, `x₁x₃`, `x₂x₃` in `Φ(Σxᵢqᵢ)`.
///
/// For the shipped constants this is `-32(x₁x₂ + x₁x₃ + 4x₂x₃)`.
pub fn r0_conic() -> [FieldElem; 3] {
    conic_of(&R0Basis::new().gram())
}

fn conic_of(g: &Mat3F) -> [FieldElem; 3] {
    [g[(0, 1)].scale_int(2), g[(0, 2)].scale_int(2), g[(1, 2)].scale_int(2)]
}

/// Evaluates the real quadratic form with Gram matrix `g` at `x`.
fn quad(g: &Mat3F, x: &[FieldElem; 3]) -> FieldElem {
    bilinear(g, x, x)
}

fn bilinear(g: &Mat3F, x: &[FieldElem; 3], y: &[FieldElem; 3]) -> FieldElem {
    let mut s = FieldElem::zero();
    for i in 0..3 {
        for j in 0..3 {
            s = &s + &(&(&x[i] * &g[(i, j)]) * &y[j]);
        }
    }
    s
}

/// Pencil angle of sample `k` of `n`: `3π/4 + kπ/n`, so sample 0 is the base point `[p_B]`.
pub fn pencil_angle(k: usize, n: usize) -> f64 {
    0.75 * PI + PI * k as f64 / n as f64
}

/// Dyadic direction `(a, b)` near `(cos φ, sin φ)`, exact at multiples of `π/4`.
fn pencil_direction(k: usize, n: usize) -> (QRat, QRat) {
    // φ = (3n + 4k)π/4n is a multiple of π/4 exactly when n divides 4k.
    if (4 * k) % n == 0 {
        let octant = (3 + 4 * k / n) % 8;
        let (a, b) = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)][octant];
        return (QRat::from_integer(a), QRat::from_integer(b));
    }
    let phi = pencil_angle(k, n);
    (crate::cxhyp::dyadic(phi.cos(), 30), crate::cxhyp::dyadic(phi.sin(), 30))
}

/// Coefficients `(-4ab, a(a+b), b(a+b))` of the conic point on the line of direction `(a, b)`
/// through `(1, 0, 0)`; `(1, 0, 0)` itself when `a + b = 0`.
fn pencil_point(a: &QRat, b: &QRat) -> [QRat; 3] {
    let (a, b) = (a.as_ratio(), b.as_ratio());
    let s = a + b;
    if num_traits::Zero::is_zero(&s) {
        return [QRat::from_integer(1), QRat::from_integer(0), QRat::from_integer(0)];
    }
    let four = num_rational::BigRational::from_integer(BigInt::from(-4));
    [QRat::from(four * a * b), QRat::from(a * &s), QRat::from(b * &s)]
}

/// Real coordinates in the `R₀` basis of the `n` pencil samples.
pub fn r0_sample_coords(n: usize) -> Vec<[QRat; 3]> {
    (0..n)
        .map(|k| {
            let (a, b) = pencil_direction(k, n);
            pencil_point(&a, &b)
        })
        .collect()
}

/// `n ≥ 3` exact points of `R₀`, uniform in the pencil angle.
pub fn sample_r0(n: usize) -> Result<Vec<ProjPoint>> {
    if n < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples".into()));
    }
    let basis = R0Basis::new();
    r0_sample_coords(n)
        .iter()
        .map(|x| ProjPoint::new(basis.lift(x)))
        .collect()
}

/// Float lift of the pencil point at angle `φ`, for refinement and plotting.
pub fn r0_float_lift(basis: &R0Basis, phi: f64) -> [Complex64; 3] {
    let (a, b) = (phi.cos(), phi.sin());
    let x = [-4.0 * a * b, a * (a + b), b * (a + b)];
    let q: Vec<[Complex64; 3]> = basis.param.q.iter().map(Vec3F::to_complex_float).collect();
    std::array::from_fn(|k| (0..3).map(|i| q[i][k] * x[i]).sum())
}

/// Matrix of `g` on `span{q₁,q₂,q₃}` in that basis; columns are the images of the `qⱼ`.
pub fn stability_matrix(basis: &R0Basis, g: &Mat3F) -> Result<Mat3F> {
    let cols: Vec<Vec3F> = basis
        .param
        .q
        .iter()
        .map(|q| basis.param.coords(&g.apply(q)))
        .collect();
    let m = Mat3F::from_columns([&cols[0], &cols[1], &cols[2]]);
    for i in 0..3 {
        for j in 0..3 {
            if !m[(i, j)].is_real() {
                return Err(Error::NonRealCoefficient(m[(i, j)].to_string()));
            }
        }
    }
    Ok(m)
}

/// `λ` with `MᵀGM = λG`, if the matrix preserves the Gram form projectively.
pub fn gram_scale(gram: &Mat3F, m: &Mat3F) -> Option<FieldElem> {
    let lhs = &(&m.transpose() * gram) * m;
    let (i, j) = (0..9).map(|k| (k / 3, k % 3)).find(|&(i, j)| !gram[(i, j)].is_zero())?;
    let lambda = lhs[(i, j)].checked_div(&gram[(i, j)]).ok()?;
    (gram.scale(&lambda) == lhs).then_some(lambda)
}

/// Exact coordinates of `p_V` in the `R₀` basis.
pub fn decompose_pv() -> Result<[FieldElem; 3]> {
    decompose_pv_for(Constants::get(), &R0Basis::new())
}

fn decompose_pv_for(k: &Constants, basis: &R0Basis) -> Result<[FieldElem; 3]> {
    let x = basis.param.coords(&k.p_v);
    for c in &x.0 {
        if !c.is_real() {
            return Err(Error::NonRealCoefficient(c.to_string()));
        }
    }
    Ok(x.0)
}

/// Generators for orbit clouds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudGenerators {
    AB,
    ST,
}

impl CloudGenerators {
    pub fn elements(self) -> (Vec<GroupElem>, [&'static str; 2]) {
        match self {
            CloudGenerators::AB => (vec![eval_str("A"), eval_str("B")], ["A", "B"]),
            CloudGenerators::ST => (vec![eval_str("S"), eval_str("T")], ["S", "T"]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CloudPoint {
    pub heis: HeisenbergCoord,
    pub word: String,
    pub word_length: usize,
    pub sample: usize,
}

/// Orbit elements as `(word, element)`, ordered by word length and then word.
///
/// Words use the generator letters, lowercase for inverses.
pub fn ordered_orbit(depth: usize, generators: CloudGenerators) -> Vec<(String, GroupElem)> {
    let (gens, labels) = generators.elements();
    let orbit = orbit_bfs(&gens, depth);
    let mut out: Vec<(String, GroupElem)> = orbit
        .entries
        .into_iter()
        .map(|e| {
            let w: String = e
                .word
                .iter()
                .map(|&(g, s)| {
                    if s > 0 {
                        labels[g].to_string()
                    } else {
                        labels[g].to_lowercase()
                    }
                })
                .collect();
            (w, e.elem)
        })
        .collect();
    out.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    out
}

/// Orbit images of the `R₀` samples with their exact lifts.
///
/// Ordered by (word length, word, sample index) independently of the thread count.
pub fn cloud_exact(
    depth: usize,
    samples: usize,
    generators: CloudGenerators,
) -> Result<Vec<(CloudPoint, Vec3F)>> {
    if samples < 3 {
        return Err(Error::InvalidArgument("need at least 3 samples".into()));
    }
    let basis = R0Basis::new();
    let coords = r0_sample_coords(samples);
    let orbit = ordered_orbit(depth, generators);
    let per_elem: Vec<Vec<(CloudPoint, Vec3F)>> = orbit
        .par_iter()
        .map(|(word, g)| {
            let gq: [Vec3F; 3] = std::array::from_fn(|i| g.apply(basis.q(i)));
            coords
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    let lift = combine_rational(&gq, x);
                    let p = CloudPoint {
                        heis: float_heisenberg(&lift),
                        word: word.clone(),
                        word_length: word.len(),
                        sample: k,
                    };
                    (p, lift)
                })
                .collect()
        })
        .collect();
    Ok(per_elem.into_iter().flatten().collect())
}

pub fn cloud(depth: usize, samples: usize, generators: CloudGenerators) -> Result<Vec<CloudPoint>> {
    Ok(cloud_exact(depth, samples, generators)?
        .into_iter()
        .map(|(p, _)| p)
        .collect())
}

/// CSV with header `re_z,im_z,t,word_length`; points at `∞` are written as `inf`.
pub fn write_cloud_csv<W: Write>(out: &mut W, points: &[CloudPoint]) -> io::Result<()> {
    writeln!(out, "re_z,im_z,t,word_length")?;
    for p in points {
        match p.heis {
            // Adding 0.0 turns -0 into 0.
            HeisenbergCoord::Finite { z, t } => {
                writeln!(out, "{},{},{},{}", z.re + 0.0, z.im + 0.0, t + 0.0, p.word_length)?
            }
            HeisenbergCoord::Infinity => writeln!(out, "inf,inf,inf,{}", p.word_length)?,
        }
    }
    Ok(())
}

/// Binary little-endian PLY with float32 `x, y, z`; points at `∞` are dropped.
pub fn write_cloud_ply<W: Write>(out: &mut W, points: &[CloudPoint]) -> io::Result<()> {
    let finite: Vec<[f64; 3]> = points.iter().filter_map(|p| p.heis.xyz()).collect();
    write!(
        out,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nend_header\n",
        finite.len()
    )?;
    for p in finite {
        for c in p {
            out.write_all(&(c as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// One link `Rᵢ ∩ Rᵢ₊₁` of a chain with its exact certificate.
#[derive(Clone, Debug)]
pub struct ChainLink {
    pub point: Vec3F,
    pub on_previous: bool,
    pub on_next: bool,
}

impl ChainLink {
    pub fn certified(&self) -> bool {
        self.on_previous && self.on_next
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub word: GroupWord,
    pub circles: Vec<RCircleParam>,
    pub links: Vec<ChainLink>,
}

impl Chain {
    pub fn all_certified(&self) -> bool {
        self.links.iter().all(ChainLink::certified)
    }
}

/// The chain `Rᵢ = C₁⋯CᵢR₀` for a word over `A^±1, B^±1`.
///
/// `R₀ ∩ CR₀` contains `A[p_B]` for `C = A` and `[p_B]` for `C = A⁻¹, B^±1`;
/// the link point of `Rᵢ₋₁, Rᵢ` is that point moved by `C₁⋯Cᵢ₋₁`.
pub fn chain(word: &GroupWord) -> Result<Chain> {
    let k = Constants::get();
    let r0 = R0Basis::new().param;
    let mut prefix = Mat3F::identity();
    let mut circles = vec![r0];
    let mut links = Vec::new();
    for &(g, e) in &word.0 {
        let (step, seed) = match (g, e > 0) {
            (Gen::A, true) => (k.a.clone(), k.a.apply(&k.p_b)),
            (Gen::A, false) => (k.a.adjoint_wrt_form(), k.p_b.clone()),
            (Gen::B, true) => (k.b.clone(), k.p_b.clone()),
            (Gen::B, false) => (k.b.adjoint_wrt_form(), k.p_b.clone()),
            _ => return Err(Error::InvalidArgument(format!("chain words use A and B only, got {g:?}"))),
        };
        let point = prefix.apply(&seed);
        prefix = &prefix * &step;
        let next = circles[0].transform(&prefix)?;
        let p = ProjPoint::new(point.clone())?;
        let link = ChainLink {
            on_previous: circles.last().expect("nonempty").contains(&p),
            on_next: next.contains(&p),
            point,
        };
        links.push(link);
        circles.push(next);
    }
    Ok(Chain {
        word: word.clone(),
        circles,
        links,
    })
}

/// Exact certificate that the two preimages of the double point share a vertical C-circle.
#[derive(Clone, Debug, Serialize)]
pub struct DoublePointCertificate {
    /// `n` with the projective line `n^⊥` of the `R₀` plane mapping to a single `z`.
    pub line_normal: [String; 3],
    /// The conic meets `n^⊥` in two real points.
    pub two_real_points: bool,
    /// `det[q, q', p_A] = 0` for lifts spanning `n^⊥`.
    pub common_ccircle: bool,
    /// Exact common chart coordinate `z₀`.
    pub z0: String,
    pub z0_float: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublePoint {
    pub z: [f64; 2],
    /// Refined pencil angles, as fractions of the period `π` measured from sample 0.
    pub params: [f64; 2],
    pub gap: f64,
    /// Nearest approach among the raw samples, before refinement.
    pub sample_indices: [usize; 2],
    pub sample_gap: f64,
    pub separation: f64,
}

#[derive(Clone, Debug)]
pub struct Lemniscate {
    /// `n + 1` planar points; the last repeats the first.
    pub points: Vec<Complex64>,
    pub double_point: DoublePoint,
    pub certificate: DoublePointCertificate,
}

impl Lemniscate {
    pub fn is_closed(&self, tol: f64) -> bool {
        let (a, b) = (self.points[0], *self.points.last().expect("nonempty"));
        (a - b).norm() <= tol
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "re_z,im_z")?;
        for z in &self.points {
            writeln!(out, "{},{}", z.re, z.im)?;
        }
        Ok(())
    }
}

/// The projection `π(R₀)` in the chart with `[p_A] = ∞`, with its double point.
pub fn lemniscate(n: usize) -> Result<Lemniscate> {
    if n < 8 {
        return Err(Error::InvalidArgument("lemniscate needs at least 8 samples".into()));
    }
    let basis = R0Basis::new();
    let coords = r0_sample_coords(n);
    let mut points = Vec::with_capacity(n + 1);
    for x in &coords {
        match float_heisenberg(&basis.lift(x)) {
            HeisenbergCoord::Finite { z, .. } => points.push(z),
            HeisenbergCoord::Infinity => return Err(Error::PointAtNewInfinity),
        }
    }
    points.push(points[0]);
    let double_point = find_double_point(&basis, &points[..n])?;
    let certificate = double_point_certificate(&basis)?;
    Ok(Lemniscate {
        points,
        double_point,
        certificate,
    })
}

fn chart_z(basis: &R0Basis, phi: f64) -> Complex64 {
    float_chart(&r0_float_lift(basis, phi)).map(|(z, _)| z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn find_double_point(basis: &R0Basis, pts: &[Complex64]) -> Result<DoublePoint> {
    let n = pts.len();
    let min_sep = (n / 10).max(2);
    let (i, j, gap) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (i, i, f64::INFINITY);
            for j in i + 1..n {
                let d = j - i;
                if d.min(n - d) < min_sep {
                    continue;
                }
                let g = (pts[i] - pts[j]).norm();
                if g < best.2 {
                    best = (i, j, g);
                }
            }
            best
        })
        .reduce(|| (0, 0, f64::INFINITY), |a, b| if b.2 < a.2 { b } else { a });
    if !gap.is_finite() {
        return Err(Error::Degenerate("no separated sample pair".into()));
    }

    // Newton on z(φ₁) = z(φ₂).
    let mut p = [pencil_angle(i, n), pencil_angle(j, n)];
    let h = 1e-7;
    for _ in 0..60 {
        let f = chart_z(basis, p[0]) - chart_z(basis, p[1]);
        if f.norm() < 1e-15 {
            break;
        }
        let d0 = (chart_z(basis, p[0] + h) - chart_z(basis, p[0] - h)) / (2.0 * h);
        let d1 = -(chart_z(basis, p[1] + h) - chart_z(basis, p[1] - h)) / (2.0 * h);
        let det = d0.re * d1.im - d1.re * d0.im;
        if det.abs() < 1e-300 {
            break;
        }
        p[0] -= (d1.im * f.re - d1.re * f.im) / det;
        p[1] -= (-d0.im * f.re + d0.re * f.im) / det;
    }
    let (z1, z2) = (chart_z(basis, p[0]), chart_z(basis, p[1]));
    let frac = |phi: f64| ((phi - 0.75 * PI) / PI).rem_euclid(1.0);
    let params = [frac(p[0]), frac(p[1])];
    let d = (params[0] - params[1]).abs();
    let z = (z1 + z2) / 2.0;
    Ok(DoublePoint {
        z: [z.re, z.im],
        params,
        gap: (z1 - z2).norm(),
        sample_indices: [i, j],
        sample_gap: gap,
        separation: d.min(1.0 - d),
    })
}

/// Builds the exact double-point certificate for `π(R₀)`.
///
/// With `a`, `b` the second and third rows of `[q₁ q₂ q₃]`, real `x, y` have the
/// same `z` iff `(a×b)·(x×y) = 0`; so the line `n^⊥`, `n = Re(a×b) × Im(a×b)`,
/// collapses to one `z`, and the conic meets it twice iff the discriminant is positive.
pub fn double_point_certificate(basis: &R0Basis) -> Result<DoublePointCertificate> {
    let q = &basis.param.q;
    let a: [FieldElem; 3] = std::array::from_fn(|i| q[i][1].clone());
    let b: [FieldElem; 3] = std::array::from_fn(|i| q[i][2].clone());
    let m = cross(&a, &b);
    let re: [FieldElem; 3] = std::array::from_fn(|i| m[i].re());
    let im: [FieldElem; 3] = std::array::from_fn(|i| m[i].im());
    let nrm = cross(&re, &im);
    if nrm.iter().all(FieldElem::is_zero) {
        return Err(Error::Degenerate("a×b is a complex multiple of a real vector".into()));
    }
    let zero = || FieldElem::zero();
    let basis_line = kernel(&Mat3F([nrm.clone(), [zero(), zero(), zero()], [zero(), zero(), zero()]]));
    let (u, v) = (&basis_line[0].0, &basis_line[1].0);
    let gram = basis.gram();
    let (cu, cv, buv) = (quad(&gram, u), quad(&gram, v), bilinear(&gram, u, v));
    let disc = &(&buv * &buv) - &(&cu * &cv);
    let two_real_points = sign_int(&disc)? > 0;

    let lu = combine_field(q, u);
    let lv = combine_field(q, v);
    let det = Mat3F::from_columns([&lu, &lv, &Vec3F::e(0)]).det();
    let z0 = if !lu[2].is_zero() {
        lu[1].checked_div(&lu[2])?
    } else {
        lv[1].checked_div(&lv[2])?
    };
    let zf = z0.to_complex_float();
    Ok(DoublePointCertificate {
        line_normal: std::array::from_fn(|i| nrm[i].to_string()),
        two_real_points,
        common_ccircle: det.is_zero(),
        z0: z0.to_string(),
        z0_float: [zf.re, zf.im],
    })
}

fn cross(a: &[FieldElem; 3], b: &[FieldElem; 3]) -> [FieldElem; 3] {
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        &(&a[j] * &b[k]) - &(&a[k] * &b[j])
    })
}

fn combine_field(q: &[Vec3F; 3], x: &[FieldElem; 3]) -> Vec3F {
    let mut acc = Vec3F::zero();
    for (v, c) in q.iter().zip(x) {
        acc = &acc + &v.scale(c);
    }
    acc
}

fn rational_vec(v: [i64; 3]) -> Vec3F {
    Vec3F::from_ints(v[0], v[1], v[2])
}

/// Exact checks of the `R₀` data: Hermitian products, stability matrices, `p_V` and fixed points.
pub fn verify_limit_data(k: &Constants) -> VerifyReport {
    let mut r = VerifyReport::default();
    let fe = |c: [i64; 8]| FieldElem::from_int_coords(c, 1).expect("unit denominator");
    let b1_inv = k.b1.inv().unwrap_or_else(|_| Mat3F::zero());
    let q2 = k.b1.apply(&k.p_b);
    let q3 = b1_inv.apply(&k.p_b);
    r.vec_eq(
        "B1 p_B = (-16, 4i√6, 3+6i√3)",
        &q2,
        &Vec3F::new((-16).into(), fe([0, 0, 0, 0, 0, 0, 0, 4]), fe([3, 0, 0, 0, 0, 0, 6, 0])),
    );
    r.vec_eq(
        "B1^-1 p_B = (-16, 8√2+4i√6, 7+2i√3)",
        &q3,
        &Vec3F::new((-16).into(), fe([0, 8, 0, 0, 0, 0, 0, 4]), fe([7, 0, 0, 0, 0, 0, 2, 0])),
    );
    r.elem_eq("<p_B,B1 p_B> = -16", &herm(&k.p_b, &q2), &(-16).into());
    r.elem_eq("<p_B,B1^-1 p_B> = -16", &herm(&k.p_b, &q3), &(-16).into());
    r.elem_eq("<B1 p_B,B1^-1 p_B> = -64", &herm(&q2, &q3), &(-64).into());
    r.elem_eq("<p_B,p_B> = 0", &norm2(&k.p_b), &FieldElem::zero());

    let basis = match R0Basis::from_constants(k) {
        Ok(b) => b,
        Err(e) => {
            r.truth("R0 basis has a real Gram matrix", false, &e.to_string());
            return r;
        }
    };
    let gram = basis.gram();
    let want_gram = Mat3F::from_ints([[0, -16, -16], [-16, 0, -64], [-16, -64, 0]]);
    r.mat_eq("Gram(p_B, B1 p_B, B1^-1 p_B)", &gram, &want_gram);

    for (name, g, cols) in [
        ("B", &k.b, [[1, 0, 0], [24, 3, -2], [8, 2, -1]]),
        ("B1", &k.b1, [[0, 1, 0], [-3, 3, 1], [1, 0, 0]]),
    ] {
        match stability_matrix(&basis, g) {
            Ok(m) => {
                for (j, c) in cols.iter().enumerate() {
                    r.vec_eq(&format!("stability of R0 under {name}: column {}", j + 1), &m.column(j), &rational_vec(*c));
                }
                let lambda = gram_scale(&gram, &m);
                let positive = lambda
                    .as_ref()
                    .map(|l| l.is_rational() && sign_int(l).ok() == Some(1))
                    .unwrap_or(false);
                r.truth(&format!("stability matrix of {name} preserves the Gram form"), positive, &m.canonical_string());
            }
            Err(e) => r.truth(&format!("stability matrix of {name} is real"), false, &e.to_string()),
        }
    }

    // The printed expansion of B₁²p_B has coefficient -3 on B₁p_B; that vector is not null.
    let printed = [FieldElem::from(-3), FieldElem::from(-3), FieldElem::one()];
    let printed_lift = combine_field(&basis.param.q, &printed);
    r.resolve(
        "printed B1^2 p_B = -3p_B - 3B1 p_B + B1^-1 p_B",
        printed_lift == k.b1.apply(&q2),
        &printed_lift.normalized().0.iter().map(FieldElem::canonical_string).collect::<Vec<_>>().join(";"),
        &k.b1.apply(&q2).normalized().0.iter().map(FieldElem::canonical_string).collect::<Vec<_>>().join(";"),
    );
    r.truth(
        "B1^2 p_B = -3p_B + 3B1 p_B + B1^-1 p_B is null",
        norm2(&k.b1.apply(&q2)).is_zero() && !norm2(&printed_lift).is_zero(),
        "conic",
    );

    match decompose_pv_for(k, &basis) {
        Ok(x) => {
            let want = [
                FieldElem::from_frac(-7, 4).expect("nonzero"),
                FieldElem::from_frac(-3, 8).expect("nonzero"),
                FieldElem::from_frac(1, 8).expect("nonzero"),
            ];
            r.vec_eq("p_V = -7/4 p_B - 3/8 B1 p_B + 1/8 B1^-1 p_B", &Vec3F(x), &Vec3F(want));
        }
        Err(e) => r.truth("p_V lies in the real plane of R0", false, &e.to_string()),
    }

    let fixed = |m: &Mat3F| kernel(&(m - &Mat3F::identity()));
    let ka = fixed(&k.a);
    r.truth("ker(A - I) = span(1,0,0)", ka.len() == 1 && ka[0].is_proportional(&Vec3F::e(0)), "A");
    let kb = fixed(&k.b);
    r.truth("ker(B - I) = span(0,0,1)", kb.len() == 1 && kb[0].is_proportional(&Vec3F::e(2)), "B");
    let kv = fixed(&k.v);
    let v_ok = kv.len() == 1
        && kv[0].is_proportional(&k.p_v)
        && sign_int(&norm2(&k.p_v)).ok() == Some(-1);
    r.truth("V is elliptic with interior fixed point [p_V]", v_ok, "V");
    r
}

/// Every exact check: group identities followed by the `R₀` data.
pub fn verify_all(k: &Constants) -> VerifyReport {
    let mut r = crate::group::verify_identities_for(k);
    r.extend(verify_limit_data(k));
    r
}
