//! Linking numbers of sampled closed curves in the Heisenberg chart.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cxhyp::{
    ccircles_of_elliptic, float_chart, heisenberg_lift, lift_to_heisenberg, sample_ccircle_lifts,
    sphere_coords, CCircle, HeisenbergCoord, ProjPoint,
};
use crate::error::{Error, Result};
use crate::group::{eval_str, orbit_bfs, Constants};
use crate::hlinalg::{norm2, Mat3F, Vec3F};
use crate::limitset::{r0_sample_coords, R0Basis};
use crate::qfield::FieldElem;

/// Chart radius beyond which a curve is treated as passing too close to `∞`.
pub const MAX_CHART_RADIUS: f64 = 1e3;
/// Minimum allowed distance between vertices of the two curves.
pub const MIN_SEPARATION: f64 = 1e-6;
/// Largest accepted distance from the Gauss sum to an integer.
pub const MAX_RESIDUAL: f64 = 0.1;

/// A polyline in the chart `(Re z, Im z, t)`.
#[derive(Clone, Debug)]
pub struct Polyline3 {
    pub points: Vec<[f64; 3]>,
    pub closed: bool,
    /// Some sample was the point `∞` and has been dropped.
    pub through_infinity: bool,
}

impl Polyline3 {
    /// Removes consecutive duplicates (and a closing duplicate of the first vertex).
    pub fn new(points: Vec<[f64; 3]>, closed: bool) -> Result<Self> {
        let mut pts: Vec<[f64; 3]> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if closed && pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        if closed && pts.len() < 3 {
            return Err(Error::InvalidArgument("closed polyline needs 3 distinct vertices".into()));
        }
        Ok(Polyline3 {
            points: pts,
            closed,
            through_infinity: false,
        })
    }

    pub fn from_heisenberg(coords: &[HeisenbergCoord]) -> Result<Self> {
        let through = coords.iter().any(|c| matches!(c, HeisenbergCoord::Infinity));
        let mut p = Polyline3::new(coords.iter().filter_map(HeisenbergCoord::xyz).collect(), true)?;
        p.through_infinity = through;
        Ok(p)
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        p.points.reverse();
        p
    }

    pub fn max_radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt())
            .fold(0.0, f64::max)
    }

    fn segments(&self) -> Vec<([f64; 3], [f64; 3])> {
        let n = self.points.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(|i| (self.points[i], self.points[(i + 1) % n])).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Linking {
    pub value: f64,
    pub integer: i64,
    pub residual: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(a, a).sqrt();
    (n > 0.0).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

/// Signed solid angle subtended by the quadrilateral of two segments, divided by `4π`
/// (closed form of the Gauss integral over one segment pair).
fn segment_pair(a0: [f64; 3], a1: [f64; 3], b0: [f64; 3], b1: [f64; 3]) -> f64 {
    let r13 = sub(b0, a0);
    let r14 = sub(b1, a0);
    let r23 = sub(b0, a1);
    let r24 = sub(b1, a1);
    let (Some(n1), Some(n2), Some(n3), Some(n4)) = (
        unit(cross(r13, r14)),
        unit(cross(r14, r24)),
        unit(cross(r24, r23)),
        unit(cross(r23, r13)),
    ) else {
        return 0.0;
    };
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(dot(n1, n2)) + asin(dot(n2, n3)) + asin(dot(n3, n4)) + asin(dot(n4, n1));
    let s = dot(cross(sub(b1, b0), sub(a1, a0)), r13);
    if s > 0.0 {
        omega / (4.0 * PI)
    } else if s < 0.0 {
        -omega / (4.0 * PI)
    } else {
        0.0
    }
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.c
    }
}

/// Gauss linking number of two disjoint closed polylines.
pub fn linking_number(a: &Polyline3, b: &Polyline3) -> Result<Linking> {
    if a.through_infinity || b.through_infinity {
        return Err(Error::InvalidArgument("curve passes through infinity; change chart first".into()));
    }
    let min_dist = a
        .points
        .par_iter()
        .map(|p| b.points.iter().map(|q| dot(sub(*p, *q), sub(*p, *q))).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
        .sqrt();
    if min_dist <= MIN_SEPARATION {
        return Err(Error::CurvesTooClose(min_dist));
    }
    let sb = b.segments();
    let partial: Vec<f64> = a
        .segments()
        .par_iter()
        .map(|&(a0, a1)| {
            let mut acc = Compensated::default();
            for &(b0, b1) in &sb {
                acc.add(segment_pair(a0, a1, b0, b1));
            }
            acc.value()
        })
        .collect();
    let mut total = Compensated::default();
    for x in partial {
        total.add(x);
    }
    let value = total.value();
    let integer = value.round();
    let residual = (value - integer).abs();
    if residual >= MAX_RESIDUAL {
        return Err(Error::InsufficientResolution(residual));
    }
    Ok(Linking {
        value,
        integer: integer as i64,
        residual,
    })
}

/// Exact `SU(2,1)` element taking the boundary point `n` to `[1, 0, 0]`.
///
/// It is `-J N⁻¹` with `N` the Heisenberg translation taking `[0, 0, 1]` to `[n]` and
/// `J` the antidiagonal involution.
pub fn chart_move_matrix(n: &Vec3F) -> Result<Mat3F> {
    if !norm2(n).is_zero() {
        return Err(Error::NotBoundary);
    }
    if n[2].is_zero() {
        return Ok(Mat3F::identity());
    }
    let inv = n[2].inv()?;
    let w1 = &n[0] * &inv;
    let z = &n[1] * &inv;
    let one = FieldElem::one;
    let zero = FieldElem::zero;
    let nmat = Mat3F([[one(), -&z.conj(), w1], [zero(), one(), z], [zero(), zero(), one()]]);
    let minus_j = Mat3F::from_ints([[0, 0, -1], [0, -1, 0], [-1, 0, 0]]);
    Ok(&minus_j * &nmat.adjoint_wrt_form())
}

/// Chart coordinates of `points` after moving `new_infinity` to `∞`.
pub fn chart_move_infinity(points: &[ProjPoint], new_infinity: &ProjPoint) -> Result<Vec<HeisenbergCoord>> {
    let m = chart_move_matrix(new_infinity.lift())?;
    points
        .iter()
        .map(|p| {
            if p.lift().is_proportional(new_infinity.lift()) {
                return Err(Error::PointAtNewInfinity);
            }
            lift_to_heisenberg(&m.apply(p.lift()))
        })
        .collect()
}

/// A circle of the boundary, sampled exactly at any density.
#[derive(Clone, Debug)]
pub enum Curve {
    /// The image `g R₀`.
    RImage { g: Mat3F },
    C(CCircle),
}

impl Curve {
    pub fn lifts(&self, n: usize) -> Result<Vec<Vec3F>> {
        match self {
            Curve::RImage { g } => {
                let basis = R0Basis::new();
                let gq: Vec<Vec3F> = basis.param.q.iter().map(|q| g.apply(q)).collect();
                Ok(r0_sample_coords(n)
                    .par_iter()
                    .map(|x| {
                        let mut acc = Vec3F::zero();
                        for (v, c) in gq.iter().zip(x) {
                            acc = &acc + &v.scale(&FieldElem::from_qrat(c));
                        }
                        acc
                    })
                    .collect())
            }
            Curve::C(c) => sample_ccircle_lifts(c, n),
        }
    }

    /// Exact incidence of a boundary point.
    pub fn contains(&self, p: &ProjPoint) -> bool {
        match self {
            Curve::RImage { g } => {
                let r0 = R0Basis::new().param;
                r0.transform(g).map(|r| r.contains(p)).unwrap_or(false)
            }
            Curve::C(c) => c.contains(p),
        }
    }
}

/// Boundary points tried as a new `∞`: short orbit images of `[p_A]` and `[p_B]`.
fn infinity_candidates() -> Vec<Vec3F> {
    let k = Constants::get();
    let orbit = orbit_bfs(&[eval_str("A"), eval_str("B")], 2);
    let mut out: Vec<Vec3F> = Vec::new();
    for e in &orbit.entries {
        for p in [&k.p_a, &k.p_b] {
            let v = e.elem.apply(p);
            if !out.iter().any(|w| w.is_proportional(&v)) {
                out.push(v);
            }
        }
    }
    out
}

fn sphere_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

/// The candidate boundary point exactly off every curve and farthest from all samples on `S³`.
pub fn choose_infinity(curves: &[&Curve], samples: &[&[Vec3F]]) -> Result<Vec3F> {
    let sphere: Vec<[f64; 4]> = samples
        .iter()
        .flat_map(|s| s.iter().map(|l| sphere_coords(&l.to_complex_float())))
        .collect();
    let mut best: Option<(f64, Vec3F)> = None;
    for cand in infinity_candidates() {
        let p = ProjPoint::new(cand.clone())?;
        if curves.iter().any(|c| c.contains(&p)) {
            continue;
        }
        let x = sphere_coords(&cand.to_complex_float());
        let d = sphere.iter().map(|s| sphere_dist(s, &x)).fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(bd, _)| d > *bd) {
            best = Some((d, cand));
        }
    }
    best.map(|(_, v)| v).ok_or(Error::Degenerate("no admissible point at infinity".into()))
}

fn chart_polyline(m: &Mat3F, lifts: &[Vec3F]) -> Result<Polyline3> {
    let coords: Vec<HeisenbergCoord> = lifts
        .par_iter()
        .map(|l| {
            let w = m.apply(l).to_complex_float();
            match float_chart(&w) {
                Some((z, t)) => HeisenbergCoord::Finite { z, t },
                None => HeisenbergCoord::Infinity,
            }
        })
        .collect();
    Polyline3::from_heisenberg(&coords)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub pair: String,
    pub integer: i64,
    pub residual: f64,
    pub samples_used: usize,
}

/// Links two exact curves at `samples` points each, doubling once if needed.
///
/// If either curve reaches `∞` or leaves the chart ball of radius [`MAX_CHART_RADIUS`],
/// both are moved by one exact chart change first.
pub fn link_curves(name: &str, a: &Curve, b: &Curve, samples: usize) -> Result<PairReport> {
    let mut last_err = Error::InsufficientResolution(f64::NAN);
    for n in [samples, 2 * samples] {
        let (la, lb) = (a.lifts(n)?, b.lifts(n)?);
        let id = Mat3F::identity();
        let (mut pa, mut pb) = (chart_polyline(&id, &la)?, chart_polyline(&id, &lb)?);
        let far = |p: &Polyline3| p.through_infinity || p.max_radius() > MAX_CHART_RADIUS;
        if far(&pa) || far(&pb) {
            let inf = choose_infinity(&[a, b], &[&la, &lb])?;
            let m = chart_move_matrix(&inf)?;
            pa = chart_polyline(&m, &la)?;
            pb = chart_polyline(&m, &lb)?;
        }
        match linking_number(&pa, &pb) {
            Ok(l) => {
                return Ok(PairReport {
                    pair: name.to_string(),
                    integer: l.integer,
                    residual: l.residual,
                    samples_used: n,
                })
            }
            Err(e @ (Error::InsufficientResolution(_) | Error::CurvesTooClose(_))) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(match last_err {
        Error::InsufficientResolution(r) => Error::InvalidArgument(format!("{name}: insufficient resolution (residual {r})")),
        Error::CurvesTooClose(d) => Error::InvalidArgument(format!("{name}: curves too close ({d}); refine samples or perturb chart")),
        e => e,
    })
}

/// `R₀, VR₀, V²R₀` and their three pairwise linking numbers.
pub fn verify_hopf_triple(samples: usize) -> Result<Vec<PairReport>> {
    let k = Constants::get();
    let v2 = &k.v * &k.v;
    let curves = [
        ("R0", Curve::RImage { g: Mat3F::identity() }),
        ("VR0", Curve::RImage { g: k.v.clone() }),
        ("V^2R0", Curve::RImage { g: v2 }),
    ];
    let mut out = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let name = format!("{}-{}", curves[i].0, curves[j].0);
        out.push(link_curves(&name, &curves[i].1, &curves[j].1, samples)?);
    }
    Ok(out)
}

/// `R₀` against each invariant C-circle of `V`.
pub fn verify_v_axes(samples: usize) -> Result<Vec<PairReport>> {
    let k = Constants::get();
    let r0 = Curve::RImage { g: Mat3F::identity() };
    ccircles_of_elliptic(&k.v)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| link_curves(&format!("R0-axis{}(V)", i + 1), &r0, &Curve::C(c), samples))
        .collect()
}

/// Heisenberg translation by `(0, t)`, exact.
pub fn vertical_translation(t: i64) -> Mat3F {
    let p = heisenberg_lift(&FieldElem::zero(), &FieldElem::from_int(t));
    let one = FieldElem::one;
    let zero = FieldElem::zero;
    Mat3F([[one(), zero(), p[0].clone()], [zero(), one(), zero()], [zero(), zero(), one()]])
}

/// Float sample of a circle in `R³`, for tests and controls.
pub fn planar_circle(center: [f64; 3], u: [f64; 3], v: [f64; 3], n: usize) -> Polyline3 {
    let pts = (0..n)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / n as f64;
            let (c, s) = (th.cos(), th.sin());
            std::array::from_fn(|i| center[i] + c * u[i] + s * v[i])
        })
        .collect();
    Polyline3::new(pts, true).expect("n ≥ 3")
}

/// Chart coordinates of a float lift, `None` at `∞`.
pub fn chart_point(w: &[Complex64; 3]) -> Option<[f64; 3]> {
    float_chart(w).map(|(z, t)| [z.re, z.im, t])
}
