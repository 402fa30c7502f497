//! The group Γ₆ generated by the order-three matrices `S` and `T`.
//!
//! Words, canonical PU(2,1) representatives, fixed points, the twelve
//! Dirichlet faces centered at `[p_U]`, the exact identity verifier and a
//! deterministic parallel breadth-first orbit enumerator.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cxhyp::{classify_point, PointClass, ProjPoint, SpinalSphere};
use crate::error::{Error, Result};
use crate::hlinalg::{eigen_in_field, herm, kernel, norm2, Mat3F, Vec3F};
use crate::qfield::FieldElem;

/// Generator names accepted in words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    S,
    T,
    A,
    B,
    U,
    V,
}

impl Gen {
    pub const ALL: [Gen; 6] = [Gen::S, Gen::T, Gen::A, Gen::B, Gen::U, Gen::V];

    fn letter(self) -> char {
        match self {
            Gen::S => 'S',
            Gen::T => 'T',
            Gen::A => 'A',
            Gen::B => 'B',
            Gen::U => 'U',
            Gen::V => 'V',
        }
    }

    fn from_letter(c: char) -> Option<(Gen, i32)> {
        let g = match c.to_ascii_uppercase() {
            'S' => Gen::S,
            'T' => Gen::T,
            'A' => Gen::A,
            'B' => Gen::B,
            'U' => Gen::U,
            'V' => Gen::V,
            _ => return None,
        };
        Some((g, if c.is_ascii_uppercase() { 1 } else { -1 }))
    }
}

/// A word in the generators; the empty word is the identity.
///
/// Text form: uppercase letters are generators, lowercase letters their
/// inverses, and `X^k` repeats a letter `k` times (negative `k` inverts).
/// Spaces, `·` and `*` are ignored. `"ABab"` is `ABA⁻¹B⁻¹`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(pub Vec<(Gen, i8)>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> Self {
        GroupWord(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn prefix(&self, n: usize) -> Self {
        GroupWord(self.0[..n].to_vec())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for &(g, e) in &self.0 {
            let c = g.letter();
            let c = if e > 0 { c } else { c.to_ascii_lowercase() };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let chars: Vec<char> = s.chars().filter(|c| !matches!(c, ' ' | '·' | '*')).collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == '1' && chars.len() == 1 {
                break;
            }
            let (g, sign) = Gen::from_letter(c)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{c}` in `{s}`")))?;
            i += 1;
            let mut exp: i32 = 1;
            if i < chars.len() && chars[i] == '^' {
                let start = i + 1;
                let mut end = start;
                if end < chars.len() && chars[end] == '-' {
                    end += 1;
                }
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let num: String = chars[start..end].iter().collect();
                exp = num
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
                i = end;
            }
            let total = exp * sign;
            let e = if total < 0 { -1 } else { 1 };
            for _ in 0..total.unsigned_abs() {
                out.push((g, e));
            }
        }
        Ok(GroupWord(out))
    }
}

/// Lift convention: `[p_{GHG⁻¹}] = G[p_H]` with lift `G p_H`.
#[derive(Clone, Debug)]
pub struct Constants {
    pub s: Mat3F,
    pub t: Mat3F,
    pub a: Mat3F,
    pub b: Mat3F,
    pub u: Mat3F,
    pub v: Mat3F,
    /// `W = S⁻¹US`.
    pub w: Mat3F,
    /// `B₁ = AB²A⁻¹ = V³BV⁻³B`.
    pub b1: Mat3F,
    pub p_a: Vec3F,
    pub p_b: Vec3F,
    /// Eigenvalue-1 eigenvector of `U`, equal to `S⁻¹p_V`.
    pub p_u: Vec3F,
    pub p_v: Vec3F,
    /// `S⁻¹p_U`, fixed by `W`.
    pub p_w: Vec3F,
    /// The vector printed as `p_U` in the source tables; equals `p_W`.
    pub p_u_printed: Vec3F,
    pub a_printed: Mat3F,
    pub b_printed: Mat3F,
}

fn fe(c: [i64; 8], d: i64) -> FieldElem {
    FieldElem::from_int_coords(c, d).expect("nonzero denominator")
}

impl Constants {
    /// The shared exact constants of Γ₆.
    pub fn get() -> &'static Constants {
        static CELL: OnceLock<Constants> = OnceLock::new();
        CELL.get_or_init(|| Constants::from_generators(Self::s_matrix(), Self::t_matrix()))
    }

    pub fn s_matrix() -> Mat3F {
        let r2 = FieldElem::sqrt2();
        let z = FieldElem::zeta();
        let one = FieldElem::one();
        let zero = FieldElem::zero();
        Mat3F([
            [one.clone(), &r2 * &z.conj(), -&one],
            [-&(&r2 * &z), -&one, zero.clone()],
            [-&one, zero.clone(), zero],
        ])
    }

    pub fn t_matrix() -> Mat3F {
        let r2 = FieldElem::sqrt2();
        let z = FieldElem::zeta();
        let one = FieldElem::one();
        let zero = FieldElem::zero();
        Mat3F([
            [zero.clone(), zero.clone(), -&one],
            [zero, -&one, -&(&r2 * &z.conj())],
            [-&one, &r2 * &z, one],
        ])
    }

    /// Builds every derived constant from a pair `(S, T)`.
    ///
    /// Panics if `S` is singular; the verifier never needs that case.
    pub fn from_generators(s: Mat3F, t: Mat3F) -> Constants {
        let s_inv = s.inv().expect("S is invertible");
        let a = &s * &t;
        let b = &t * &s;
        let u = &s_inv * &t;
        let v = &t * &s_inv;
        let w = &(&s_inv * &u) * &s;
        let a_inv = a.inv().expect("A is invertible");
        let b1 = &(&(&a * &b) * &b) * &a_inv;

        let r2 = FieldElem::sqrt2();
        let p_a = Vec3F::e(0);
        let p_b = Vec3F::e(2);
        // (4, √2 - i√6, -2 - 2i√3)
        let p_v = Vec3F::new(
            4.into(),
            fe([0, 1, 0, 0, 0, 0, 0, -1], 1),
            fe([-2, 0, 0, 0, 0, 0, -2, 0], 1),
        );
        let p_u = s_inv.apply(&p_v);
        let p_w = s_inv.apply(&p_u);
        // (4, -√2(3 + i√3), -4)
        let p_u_printed = Vec3F::new(
            4.into(),
            &(-&r2) * &fe([3, 0, 0, 0, 0, 0, 1, 0], 1),
            (-4).into(),
        );
        let one = FieldElem::one();
        let zero = FieldElem::zero();
        let a_printed = Mat3F([
            [one.clone(), -&r2, fe([-1, 0, 0, 0, 0, 0, 1, 0], 1)],
            [zero.clone(), one.clone(), r2.clone()],
            [zero.clone(), zero.clone(), one.clone()],
        ]);
        let b_printed = Mat3F([
            [one.clone(), zero.clone(), zero.clone()],
            [r2.clone(), one.clone(), zero.clone()],
            [fe([-1, 0, 0, 0, 0, 0, -1, 0], 1), -&r2, one],
        ]);
        Constants {
            s,
            t,
            a,
            b,
            u,
            v,
            w,
            b1,
            p_a,
            p_b,
            p_u,
            p_v,
            p_w,
            p_u_printed,
            a_printed,
            b_printed,
        }
    }

    pub fn gen_matrix(&self, g: Gen) -> &Mat3F {
        match g {
            Gen::S => &self.s,
            Gen::T => &self.t,
            Gen::A => &self.a,
            Gen::B => &self.b,
            Gen::U => &self.u,
            Gen::V => &self.v,
        }
    }

    /// Exact product of a word, as a matrix in SU(2,1).
    pub fn word_matrix(&self, w: &GroupWord) -> Mat3F {
        let mut acc = Mat3F::identity();
        for &(g, e) in &w.0 {
            let m = self.gen_matrix(g);
            if e > 0 {
                acc = &acc * m;
            } else {
                acc = &acc * &m.adjoint_wrt_form();
            }
        }
        acc
    }

    /// The face `𝒥_k^±` as the spinal sphere `𝔅(p_U, U^k p_V)` or `𝔅(p_U, U^k p_W)`.
    pub fn face(&self, id: FaceId) -> SpinalSphere {
        face_of(self, id)
    }

    pub fn faces(&self) -> Vec<(FaceId, SpinalSphere)> {
        FaceId::all().into_iter().map(|id| (id, self.face(id))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FaceSide {
    Plus,
    Minus,
}

/// A Dirichlet face `𝒥_k^±`, `k ∈ Z/6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaceId {
    pub k: u8,
    pub side: FaceSide,
}

impl FaceId {
    pub fn new(k: i32, side: FaceSide) -> Self {
        FaceId {
            k: k.rem_euclid(6) as u8,
            side,
        }
    }

    pub fn plus(k: i32) -> Self {
        Self::new(k, FaceSide::Plus)
    }

    pub fn minus(k: i32) -> Self {
        Self::new(k, FaceSide::Minus)
    }

    pub fn all() -> Vec<FaceId> {
        (0..6)
            .flat_map(|k| [FaceId::plus(k), FaceId::minus(k)])
            .collect()
    }
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.side {
            FaceSide::Plus => '+',
            FaceSide::Minus => '-',
        };
        write!(f, "J{}{}", self.k, s)
    }
}

/// An element of PU(2,1), stored as the canonical one of its three SU(2,1) lifts.
#[derive(Clone)]
pub struct GroupElem {
    rep: Mat3F,
    key: String,
}

impl GroupElem {
    /// Canonicalizes `m` among `{m, ωm, ω²m}` by least serialized form.
    pub fn from_matrix(m: Mat3F) -> Self {
        let w = FieldElem::omega();
        let m1 = m.scale(&w);
        let m2 = m1.scale(&w);
        [m, m1, m2]
            .into_iter()
            .map(|rep| {
                let key = rep.canonical_string();
                GroupElem { rep, key }
            })
            .min_by(|x, y| x.key.cmp(&y.key))
            .expect("three candidates")
    }

    pub fn identity() -> Self {
        Self::from_matrix(Mat3F::identity())
    }

    pub fn rep(&self) -> &Mat3F {
        &self.rep
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    /// Short hex digest of the canonical serialization.
    pub fn digest(&self) -> String {
        short_hash(&self.key)
    }

    pub fn mul(&self, rhs: &GroupElem) -> GroupElem {
        GroupElem::from_matrix(&self.rep * &rhs.rep)
    }

    /// Inverse via the form adjoint (exact for SU(2,1) lifts).
    pub fn inverse(&self) -> GroupElem {
        GroupElem::from_matrix(self.rep.adjoint_wrt_form())
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_scalar()
    }

    pub fn apply(&self, v: &Vec3F) -> Vec3F {
        self.rep.apply(v)
    }
}

impl PartialEq for GroupElem {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for GroupElem {}

impl std::hash::Hash for GroupElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElem({})", self.digest())
    }
}

pub fn short_hash(s: &str) -> String {
    let d = Sha256::digest(s.as_bytes());
    hex::encode(&d[..8])
}

/// Exact product of the word, canonicalized in PU(2,1).
pub fn evaluate(w: &GroupWord) -> GroupElem {
    GroupElem::from_matrix(Constants::get().word_matrix(w))
}

/// Parses and evaluates a word; panics on malformed input (for constants and tests).
pub fn eval_str(s: &str) -> GroupElem {
    evaluate(&s.parse().expect("well-formed word"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryKind {
    Elliptic { regular: bool },
    ParabolicUnipotent,
    Parabolic,
    Loxodromic,
}

#[derive(Clone, Debug)]
pub struct FixedPointInfo {
    pub kind: IsometryKind,
    /// One interior point (elliptic), one boundary point (parabolic) or two (loxodromic).
    pub points: Vec<ProjPoint>,
}

/// Isometry type and fixed point(s) of `g`.
pub fn fixed_point(g: &GroupElem) -> Result<FixedPointInfo> {
    let m = g.rep();
    if m.is_scalar() {
        return Err(Error::Degenerate("identity in PU(2,1) has no isolated fixed point".into()));
    }
    let eig = eigen_in_field(m);
    if !eig.complete {
        return Err(Error::SpectrumOutsideField);
    }
    let mut negative = Vec::new();
    let mut null = Vec::new();
    for (_, v) in eig.pairs() {
        match classify_point(&ProjPoint::new(v.clone())?) {
            PointClass::Interior => negative.push(v),
            PointClass::Boundary => null.push(v),
            PointClass::Exterior => {}
        }
    }
    let distinct = eig.eigenspaces.len();
    if let Some(v) = negative.into_iter().next() {
        return Ok(FixedPointInfo {
            kind: IsometryKind::Elliptic {
                regular: distinct == 3,
            },
            points: vec![ProjPoint::new(v)?],
        });
    }
    let points = null.into_iter().map(ProjPoint::new).collect::<Result<Vec<_>>>()?;
    let kind = match (points.len(), distinct) {
        (1, 1) => IsometryKind::ParabolicUnipotent,
        (1, _) => IsometryKind::Parabolic,
        (2, _) => IsometryKind::Loxodromic,
        _ => return Err(Error::Degenerate("no fixed point in the closed ball".into())),
    };
    Ok(FixedPointInfo { kind, points })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "location", content = "faces")]
pub enum DirichletLocation {
    Inside,
    OnFace(Vec<FaceId>),
    /// Faces whose strict inequality is violated.
    Outside(Vec<FaceId>),
}

/// Position of an interior point relative to the Dirichlet domain centered at `[p_U]`.
///
/// Inside means `|⟨p_U, w⟩|² ≤ |⟨g p_U, w⟩|²` for every face `𝔅(p_U, g p_U)`.
pub fn dirichlet_contains(p: &ProjPoint) -> Result<DirichletLocation> {
    if classify_point(p) != PointClass::Interior {
        return Err(Error::NotInterior);
    }
    let k = Constants::get();
    let mut on = Vec::new();
    let mut out = Vec::new();
    for (id, face) in k.faces() {
        match face.side(p)? {
            1 => out.push(id),
            0 => on.push(id),
            _ => {}
        }
    }
    Ok(if !out.is_empty() {
        DirichletLocation::Outside(out)
    } else if !on.is_empty() {
        DirichletLocation::OnFace(on)
    } else {
        DirichletLocation::Inside
    })
}

/// One element found by [`orbit_bfs`] with the first word reaching it.
#[derive(Clone, Debug)]
pub struct OrbitEntry {
    pub elem: GroupElem,
    /// Letters as `(generator index, ±1)` into the generator list.
    pub word: Vec<(usize, i8)>,
}

impl OrbitEntry {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Orbit {
    /// In discovery order: by word length, then by parent order and generator order.
    pub entries: Vec<OrbitEntry>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of elements of word length ≤ `n`.
    pub fn count_up_to(&self, n: usize) -> usize {
        self.entries.iter().filter(|e| e.len() <= n).count()
    }

    /// Newline-delimited canonical matrix serializations, sorted.
    pub fn dump_sorted(&self) -> String {
        let mut keys: Vec<&str> = self.entries.iter().map(|e| e.elem.key()).collect();
        keys.sort_unstable();
        let mut out = String::new();
        for k in keys {
            out.push_str(k);
            out.push('\n');
        }
        out
    }

    /// Renders a word with the given generator labels; inverses get a `⁻¹`-free `^-1` suffix.
    pub fn word_string(&self, entry: &OrbitEntry, labels: &[String]) -> String {
        if entry.word.is_empty() {
            return "1".to_string();
        }
        entry
            .word
            .iter()
            .map(|&(g, e)| {
                if e > 0 {
                    labels[g].clone()
                } else {
                    format!("({})^-1", labels[g])
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }
}

/// All distinct PU(2,1) elements of word length ≤ `max_len` in `generators` and their inverses.
///
/// Each level is expanded in parallel and merged in a fixed order, so the
/// output does not depend on the number of worker threads.
pub fn orbit_bfs(generators: &[GroupElem], max_len: usize) -> Orbit {
    let letters: Vec<(usize, i8, GroupElem)> = generators
        .iter()
        .enumerate()
        .flat_map(|(i, g)| [(i, 1i8, g.clone()), (i, -1i8, g.inverse())])
        .collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let identity = GroupElem::identity();
    seen.insert(identity.key().to_string(), 0);
    let mut entries = vec![OrbitEntry {
        elem: identity,
        word: Vec::new(),
    }];
    let mut frontier: Vec<usize> = vec![0];
    for _ in 0..max_len {
        let candidates: Vec<Vec<(usize, usize, GroupElem)>> = frontier
            .par_iter()
            .map(|&idx| {
                let parent = &entries[idx];
                let last = parent.word.last().copied();
                letters
                    .iter()
                    .enumerate()
                    .filter(|(_, (g, e, _))| last != Some((*g, -*e)))
                    .map(|(li, (_, _, m))| (idx, li, parent.elem.mul(m)))
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (idx, li, elem) in candidates.into_iter().flatten() {
            if seen.contains_key(elem.key()) {
                continue;
            }
            let (g, e, _) = &letters[li];
            let mut word = entries[idx].word.clone();
            word.push((*g, *e));
            seen.insert(elem.key().to_string(), entries.len());
            next.push(entries.len());
            entries.push(OrbitEntry { elem, word });
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Orbit { entries }
}

/// Runs `f` on a dedicated pool of `threads` workers (or the global pool for `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// The generators `{B, AB²A⁻¹B⁻¹}` of the free subgroup Γ′.
pub fn gamma_prime_generators() -> Vec<GroupElem> {
    vec![eval_str("B"), eval_str("AB^2ab")]
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Informational comparison used to settle a convention; does not affect the verdict.
    Resolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    #[serde(rename = "identity-name")]
    pub name: String,
    pub status: CheckStatus,
    #[serde(rename = "lhs-hash")]
    pub lhs_hash: String,
    #[serde(rename = "rhs-hash")]
    pub rhs_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, ok: bool, lhs: &str, rhs: &str) {
        self.checks.push(IdentityCheck {
            name: name.to_string(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs_hash: short_hash(lhs),
            rhs_hash: short_hash(rhs),
            detail: None,
        });
    }

    pub fn resolve(&mut self, name: &str, holds: bool, lhs: &str, rhs: &str) {
        self.checks.push(IdentityCheck {
            name: name.to_string(),
            status: CheckStatus::Resolved,
            lhs_hash: short_hash(lhs),
            rhs_hash: short_hash(rhs),
            detail: Some(if holds { "holds" } else { "does not hold" }.to_string()),
        });
    }

    /// Exact matrix equality in SU(2,1).
    pub fn mat_eq(&mut self, name: &str, lhs: &Mat3F, rhs: &Mat3F) {
        let (l, r) = (lhs.canonical_string(), rhs.canonical_string());
        self.push(name, lhs == rhs, &l, &r);
    }

    /// Equality in PU(2,1).
    pub fn pu_eq(&mut self, name: &str, lhs: &Mat3F, rhs: &Mat3F) {
        let (l, r) = (
            GroupElem::from_matrix(lhs.clone()),
            GroupElem::from_matrix(rhs.clone()),
        );
        self.push(name, l == r, l.key(), r.key());
    }

    /// Projective equality of two lifts.
    pub fn proj_eq(&mut self, name: &str, lhs: &Vec3F, rhs: &Vec3F) {
        let ok = !lhs.is_zero() && lhs.is_proportional(rhs);
        self.push(name, ok, &vec_key(lhs), &vec_key(rhs));
    }

    pub fn vec_eq(&mut self, name: &str, lhs: &Vec3F, rhs: &Vec3F) {
        self.push(name, lhs == rhs, &vec_key(lhs), &vec_key(rhs));
    }

    pub fn elem_eq(&mut self, name: &str, lhs: &FieldElem, rhs: &FieldElem) {
        let (l, r) = (lhs.canonical_string(), rhs.canonical_string());
        self.push(name, lhs == rhs, &l, &r);
    }

    pub fn truth(&mut self, name: &str, ok: bool, what: &str) {
        self.push(name, ok, what, "true");
    }

    pub fn sphere_eq(&mut self, name: &str, lhs: &SpinalSphere, rhs: &SpinalSphere) {
        self.push(name, lhs.same_locus(rhs), &lhs.key(), &rhs.key());
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.checks.extend(other.checks);
    }
}

fn vec_key(v: &Vec3F) -> String {
    v.normalized()
        .0
        .iter()
        .map(FieldElem::canonical_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Exact checks of the group-level identities.
pub fn verify_identities() -> VerifyReport {
    verify_identities_for(Constants::get())
}

pub fn verify_identities_for(k: &Constants) -> VerifyReport {
    let mut r = VerifyReport::default();
    let id = Mat3F::identity();
    let inv = |m: &Mat3F| m.inv().unwrap_or_else(|_| Mat3F::zero());
    let pow = |m: &Mat3F, e: i32| m.pow(e).unwrap_or_else(|_| Mat3F::zero());
    let (s, t, a, b, u, v, w) = (&k.s, &k.t, &k.a, &k.b, &k.u, &k.v, &k.w);
    let (si, ti, ai, bi, ui) = (inv(s), inv(t), inv(a), inv(b), inv(u));

    r.mat_eq("A = ST matches the printed A", a, &k.a_printed);
    r.mat_eq("B = TS matches the printed B", b, &k.b_printed);
    for (name, m) in [("S", s), ("T", t), ("A", a), ("B", b), ("U", u), ("V", v), ("W", w)] {
        r.truth(&format!("{name} in SU(2,1)"), m.is_su21(), &m.canonical_string());
    }

    r.mat_eq("S^3 = Id", &pow(s, 3), &id);
    r.mat_eq("T^3 = Id", &pow(t, 3), &id);
    r.pu_eq("(S^-1 T)^6 = Id in PU(2,1)", &pow(u, 6), &id);
    r.pu_eq("V^6 = Id in PU(2,1)", &pow(v, 6), &id);
    let order_six = |m: &Mat3F| (1..6).all(|e| !pow(m, e).is_scalar()) && pow(m, 6).is_scalar();
    r.truth("U has order 6", order_six(u), &u.canonical_string());
    r.truth("V has order 6", order_six(v), &v.canonical_string());

    let comm = &(&(a * b) * &ai) * &bi;
    r.mat_eq("[A,B] = ABA^-1B^-1 = V^3", &comm, &pow(v, 3));
    r.resolve(
        "A^-1B^-1AB = V^3 in PU(2,1) (commutator convention)",
        GroupElem::from_matrix(&(&(&ai * &bi) * a) * b) == GroupElem::from_matrix(pow(v, 3)),
        &(&(&ai * &bi) * a).canonical_string(),
        &pow(v, 3).canonical_string(),
    );
    r.resolve(
        "V^3 has order 2 in SU(2,1) (V^6 = Id exactly)",
        pow(v, 6).is_identity(),
        &pow(v, 6).canonical_string(),
        &id.canonical_string(),
    );

    r.mat_eq("SAS^-1 = B^-1A^-1", &(&(s * a) * &si), &(&bi * &ai));
    r.mat_eq("SBS^-1 = A", &(&(s * b) * &si), a);
    r.mat_eq("TAT^-1 = B", &(&(t * a) * &ti), b);
    r.mat_eq("TBT^-1 = A^-1B^-1", &(&(t * b) * &ti), &(&ai * &bi));
    r.mat_eq("A^-1UA = U^-1VU", &(&(&ai * u) * a), &(&(&ui * v) * u));
    r.mat_eq("A^-1WA = U", &(&(&ai * w) * a), u);
    r.mat_eq("W = S^-1US = STS", w, &(&(s * t) * s));
    r.mat_eq("B = TAT^-1 and V = TUT^-1", &(&(t * u) * &ti), v);

    let v3 = pow(v, 3);
    r.mat_eq("V^3BV^-3 = AB^2A^-1B^-1", &(&(&v3 * b) * &inv(&v3)), &(&(&(&(a * b) * b) * &ai) * &bi));
    r.mat_eq("B1 = V^3BV^-3B = AB^2A^-1", &(&(&(&v3 * b) * &inv(&v3)) * b), &k.b1);

    r.vec_eq("U p_U = p_U", &u.apply(&k.p_u), &k.p_u);
    r.vec_eq("V p_V = p_V", &v.apply(&k.p_v), &k.p_v);
    r.vec_eq("W p_W = p_W", &w.apply(&k.p_w), &k.p_w);
    r.vec_eq("A p_A = p_A", &a.apply(&k.p_a), &k.p_a);
    r.vec_eq("B p_B = p_B", &b.apply(&k.p_b), &k.p_b);
    r.elem_eq("<p_U,p_U> = -8", &norm2(&k.p_u), &(-8).into());
    r.elem_eq("<p_V,p_V> = -8", &norm2(&k.p_v), &(-8).into());
    r.proj_eq("printed p_U = S p_V = p_W", &k.p_u_printed, &k.p_w);
    r.resolve(
        "printed p_U is fixed by U = S^-1T",
        u.apply(&k.p_u_printed).is_proportional(&k.p_u_printed),
        &vec_key(&u.apply(&k.p_u_printed)),
        &vec_key(&k.p_u_printed),
    );

    r.proj_eq("A^-1 p_U ~ U^-1 p_V", &ai.apply(&k.p_u), &ui.apply(&k.p_v));
    r.proj_eq("A^-1 p_W ~ p_U", &ai.apply(&k.p_w), &k.p_u);
    r.proj_eq("S^-1 p_U ~ p_W", &si.apply(&k.p_u), &k.p_w);
    r.proj_eq("S^-1 p_V ~ p_U", &si.apply(&k.p_v), &k.p_u);
    r.proj_eq("A U^-2 p_B ~ U p_B", &a.apply(&pow(u, -2).apply(&k.p_b)), &u.apply(&k.p_b));
    let u3 = pow(u, 3);
    let a_conj = &(&u3 * a) * &inv(&u3);
    r.proj_eq(
        "U^3AU^-3 (U p_B) ~ U^-2 p_B",
        &a_conj.apply(&u.apply(&k.p_b)),
        &pow(u, -2).apply(&k.p_b),
    );

    // Faces and string of beads.
    let face = |f: FaceId| face_of(k, f);
    let j0p = face(FaceId::plus(0));
    let j0m = face(FaceId::minus(0));
    r.sphere_eq("A J_{-1}^+ = J_0^-", &face(FaceId::plus(-1)).transform(a), &j0m);
    r.sphere_eq("U^3AU^-3 J_2^+ = J_3^-", &face(FaceId::plus(2)).transform(&a_conj), &face(FaceId::minus(3)));
    r.resolve(
        "J_0^- = S^-1 J_0^+",
        j0p.transform(&si).same_locus(&j0m),
        &j0p.transform(&si).key(),
        &j0m.key(),
    );
    r.resolve(
        "J_0^- = S J_0^+",
        j0p.transform(s).same_locus(&j0m),
        &j0p.transform(s).key(),
        &j0m.key(),
    );
    let faces: Vec<_> = FaceId::all().into_iter().map(face).collect();
    let distinct = (0..faces.len()).all(|i| (i + 1..faces.len()).all(|j| !faces[i].same_locus(&faces[j])));
    r.truth("the 12 faces J_k^+- are pairwise distinct", distinct, "faces");

    for (pt_name, pt, f1, f2) in bead_tangencies(k) {
        for f in [f1, f2] {
            let on = ProjPoint::new(pt.clone())
                .map(|p| face(f).contains(&p))
                .unwrap_or(false);
            r.truth(&format!("{pt_name} lies on {f}"), on, &vec_key(&pt));
        }
    }
    r
}

fn face_of(k: &Constants, f: FaceId) -> SpinalSphere {
    let uk = k.u.pow(f.k as i32).unwrap_or_else(|_| Mat3F::zero());
    let other = match f.side {
        FaceSide::Plus => &k.p_v,
        FaceSide::Minus => &k.p_w,
    };
    SpinalSphere::new_unchecked(uk.apply(&k.p_u), uk.apply(other))
}

/// The string of beads `J₀⁻, J₋₁⁺, J₃⁻, J₂⁺` with each tangency point and the two beads through it.
pub fn bead_tangencies(k: &Constants) -> Vec<(&'static str, Vec3F, FaceId, FaceId)> {
    let pow = |e: i32| k.u.pow(e).unwrap_or_else(|_| Mat3F::zero());
    vec![
        ("[p_A]", k.p_a.clone(), FaceId::minus(0), FaceId::plus(-1)),
        ("U[p_B]", k.u.apply(&k.p_b), FaceId::minus(0), FaceId::plus(2)),
        ("U^3[p_A]", pow(3).apply(&k.p_a), FaceId::minus(3), FaceId::plus(2)),
        ("U^-2[p_B]", pow(-2).apply(&k.p_b), FaceId::plus(-1), FaceId::minus(3)),
    ]
}

/// The beads in cyclic order.
pub fn beads() -> [FaceId; 4] {
    [FaceId::minus(0), FaceId::plus(-1), FaceId::minus(3), FaceId::plus(2)]
}

/// A point of `𝔅(z₁, z₂)` in `H²_C` on the geodesic between the two centers.
pub fn bisector_midpoint(z1: &Vec3F, z2: &Vec3F) -> Result<Vec3F> {
    let h = herm(z1, z2);
    if h.is_zero() {
        return Err(Error::Degenerate("orthogonal lifts".into()));
    }
    // μ = ∓ h̄/h has modulus one, so |⟨z₁, z₁ + μz₂⟩| = |⟨z₂, z₁ + μz₂⟩| for equal norms.
    let ratio = h.conj().checked_div(&h)?;
    let plus = z1 + &z2.scale(&ratio);
    let minus = z1 - &z2.scale(&ratio);
    for cand in [minus, plus] {
        if classify_point(&ProjPoint::new(cand.clone())?) == PointClass::Interior {
            return Ok(cand);
        }
    }
    Err(Error::NotInterior)
}

/// Kernel basis of `g - I`; exposed for fixed-point tables.
pub fn fixed_vectors(m: &Mat3F) -> Vec<Vec3F> {
    kernel(&(m - &Mat3F::identity()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_parsing() {
        let w: GroupWord = "ABab".parse().unwrap();
        assert_eq!(w.to_string(), "ABab");
        let w2: GroupWord = "A B^-1 A^2".parse().unwrap();
        assert_eq!(w2.to_string(), "AbAA");
        assert_eq!("S^3".parse::<GroupWord>().unwrap().len(), 3);
        assert!("AX".parse::<GroupWord>().is_err());
        assert!("".parse::<GroupWord>().unwrap().is_empty());
        assert_eq!(w.inverse().to_string(), "BAba");
    }

    #[test]
    fn evaluate_examples() {
        assert!(eval_str("SSS").is_identity());
        assert_eq!(eval_str("ABab"), eval_str("VVV"));
        assert_eq!(eval_str("SAs"), eval_str("ba"));
        assert!(eval_str("").is_identity() && eval_str("").rep().is_scalar());
    }

    #[test]
    fn canonical_form_is_constant_on_lifts() {
        let g = eval_str("ATbU");
        let m = g.rep().clone();
        let z2 = FieldElem::zeta().pow(2);
        assert_eq!(GroupElem::from_matrix(m.scale(&z2)), g);
        assert_eq!(GroupElem::from_matrix(m.scale(&z2.pow(2))), g);
        let again = GroupElem::from_matrix(g.rep().clone());
        assert_eq!(again.rep(), g.rep());
    }

    #[test]
    fn evaluate_is_a_morphism() {
        for (x, y) in [("AB", "Sa"), ("UUt", "vB"), ("", "T")] {
            let w1: GroupWord = x.parse().unwrap();
            let w2: GroupWord = y.parse().unwrap();
            assert_eq!(evaluate(&w1.concat(&w2)), evaluate(&w1).mul(&evaluate(&w2)));
        }
    }

    #[test]
    fn identities_all_pass() {
        let r = verify_identities();
        assert!(r.all_pass(), "failures: {:?}", r.failures());
        assert_eq!(r.get("J_0^- = S^-1 J_0^+").unwrap().detail.as_deref(), Some("holds"));
        assert_eq!(r.get("J_0^- = S J_0^+").unwrap().detail.as_deref(), Some("does not hold"));
        assert_eq!(
            r.get("V^3 has order 2 in SU(2,1) (V^6 = Id exactly)").unwrap().detail.as_deref(),
            Some("holds")
        );
    }

    #[test]
    fn corrupted_generator_fails() {
        let mut s = Constants::s_matrix();
        s[(0, 0)] = 2.into();
        let k = Constants::from_generators(s, Constants::t_matrix());
        let r = verify_identities_for(&k);
        assert!(!r.all_pass());
        assert!(r.failures().contains(&"S^3 = Id"));
    }

    #[test]
    fn fixed_points() {
        let a = fixed_point(&eval_str("A")).unwrap();
        assert_eq!(a.kind, IsometryKind::ParabolicUnipotent);
        assert!(a.points[0].lift().is_proportional(&Vec3F::e(0)));
        let v = fixed_point(&eval_str("V")).unwrap();
        assert_eq!(v.kind, IsometryKind::Elliptic { regular: true });
        assert!(v.points[0].lift().is_proportional(&Constants::get().p_v));
        assert!(fixed_point(&GroupElem::identity()).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let k = Constants::get();
        let center = ProjPoint::new(k.p_u.clone()).unwrap();
        assert_eq!(dirichlet_contains(&center).unwrap(), DirichletLocation::Inside);
        let mid = ProjPoint::new(bisector_midpoint(&k.p_u, &k.p_v).unwrap()).unwrap();
        match dirichlet_contains(&mid).unwrap() {
            DirichletLocation::OnFace(f) => assert!(f.contains(&FaceId::plus(0))),
            other => panic!("expected on-face, got {other:?}"),
        }
        let moved = ProjPoint::new(k.a.apply(&k.p_u)).unwrap();
        assert!(matches!(dirichlet_contains(&moved).unwrap(), DirichletLocation::Outside(_)));
        assert!(dirichlet_contains(&ProjPoint::new(k.p_b.clone()).unwrap()).is_err());
    }

    #[test]
    fn orbit_small_cases() {
        assert_eq!(orbit_bfs(&[eval_str("S")], 10).len(), 3);
        assert_eq!(orbit_bfs(&[eval_str("A"), eval_str("B")], 0).len(), 1);
        let o = orbit_bfs(&gamma_prime_generators(), 2);
        assert_eq!(o.count_up_to(1), 5);
        assert_eq!(o.count_up_to(2), 17);
    }

    #[test]
    fn orbit_is_thread_independent() {
        let gens = [eval_str("A"), eval_str("B")];
        let one = with_threads(Some(1), || orbit_bfs(&gens, 3));
        let many = with_threads(Some(4), || orbit_bfs(&gens, 3));
        assert_eq!(one.dump_sorted(), many.dump_sorted());
        let w1: Vec<_> = one.entries.iter().map(|e| e.word.clone()).collect();
        let w2: Vec<_> = many.entries.iter().map(|e| e.word.clone()).collect();
        assert_eq!(w1, w2);
    }
}
