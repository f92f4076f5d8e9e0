//! Walls for a fixed class `v`: rank-two wall lattices, effectivity at a
//! side of a wall, class-level Jordan-Hölder decompositions and scans of
//! linear charge paths.
//!
//! All pairings here are Mukai pairings `(x, y) = -χ(x, y)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::charge_domains::{CentralCharge, Charge};
use crate::error::{Error, Result};
use crate::k_model::mukai;
use crate::linalg::{self, RatMatrix};
use crate::rational::{cross, dot, rational_sqrt, Rational, Real};
use crate::root_lattice::{LatticeVector, RootSystemData};

/// Float tolerance for wall equations.
pub const WALL_TOLERANCE: f64 = 1e-9;
/// Roots of the wall equation closer than this to a path endpoint are
/// reported as the endpoint lying on a wall.
pub const ENDPOINT_MARGIN: f64 = 1e-7;
/// Side perturbation used when decomposing a class at a scanned wall.
pub const SIDE_EPSILON: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WallKind {
    /// Two spherical generators with Mukai pairing `-1`, `0` or `1`.
    SphericalPair(i64),
    /// `v` radical, `w` spherical.
    RadicalPlusSpherical,
    /// Both generators radical; this is never a wall.
    DegenerateRadical,
}

impl fmt::Display for WallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallKind::SphericalPair(k) => write!(f, "SphericalPair({k})"),
            WallKind::RadicalPlusSpherical => write!(f, "RadicalPlusSpherical"),
            WallKind::DegenerateRadical => write!(f, "DegenerateRadical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rank2WallLattice {
    pub v: LatticeVector,
    pub w: LatticeVector,
    pub pairing_matrix: [[i64; 2]; 2],
    pub kind: WallKind,
}

impl Rank2WallLattice {
    pub fn is_wall(&self) -> bool {
        self.kind != WallKind::DegenerateRadical
    }
}

pub fn classify_wall_lattice(
    sys: &RootSystemData,
    v: &LatticeVector,
    w: &LatticeVector,
) -> Result<Rank2WallLattice> {
    sys.check_dim(v)?;
    sys.check_dim(w)?;
    let g = v.content();
    if g != 1 {
        return Err(Error::NotPrimitive(g));
    }
    if linalg::minor_gcd_2(v.coords(), w.coords()) == 0 {
        return Err(Error::LinearlyDependent);
    }
    let vv = mukai(sys, v, v)?;
    let vw = mukai(sys, v, w)?;
    let ww = mukai(sys, w, w)?;
    let m = [[vv, vw], [vw, ww]];
    let kind = match m {
        [[-2, k], [_, -2]] if k.abs() <= 1 => WallKind::SphericalPair(k),
        [[0, 0], [0, -2]] => WallKind::RadicalPlusSpherical,
        [[0, 0], [0, 0]] => WallKind::DegenerateRadical,
        _ => return Err(Error::UnsupportedPairing(m)),
    };
    Ok(Rank2WallLattice {
        v: v.clone(),
        w: w.clone(),
        pairing_matrix: m,
        kind,
    })
}

/// Spherical classes in the span of `v` and `w`.
pub fn spherical_classes_in(h: &Rank2WallLattice, n_bound: i64) -> Vec<LatticeVector> {
    let (v, w) = (&h.v, &h.w);
    let mut out = match h.kind {
        WallKind::SphericalPair(k) => {
            let mut c = vec![v.clone(), -v, w.clone(), -w];
            match k {
                -1 => c.extend([v - w, w - v]),
                1 => c.extend([v + w, -&(v + w)]),
                _ => {}
            }
            c
        }
        WallKind::RadicalPlusSpherical => (-n_bound..=n_bound)
            .flat_map(|n| [w + &(n * v), &(n * v) - w])
            .collect(),
        WallKind::DegenerateRadical => Vec::new(),
    };
    out.sort();
    out
}

/// A charge on a wall together with the side from which effectivity is read.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectivityContext<R: Real> {
    pub z: Charge<R>,
    pub side_direction: Charge<R>,
    pub epsilon: R,
}

impl<R: Real> EffectivityContext<R> {
    pub fn perturbed(&self) -> Charge<R> {
        let values = self
            .z
            .values()
            .iter()
            .zip(self.side_direction.values())
            .map(|(z, d)| z.clone() + d.clone() * Complex::new(self.epsilon.clone(), R::zero()))
            .collect();
        Charge::new(values).with_tolerance(self.z.tol())
    }
}

fn effective_at<R: Real>(
    sys: &RootSystemData,
    zp: &Charge<R>,
    zv: &Complex<R>,
    c: &LatticeVector,
) -> Result<bool> {
    if mukai(sys, c, c)? < -2 {
        return Ok(false);
    }
    // same ray as Z(v): re(Z(c)/Z(v)) > 0
    Ok(dot(&zp.eval(c), zv).is_pos(zp.tol() * zp.tol()))
}

/// `c² >= -2` and `Z'(c)` on the ray of `Z'(v)` (positive real ratio
/// part), at the perturbed charge `Z' = Z + ε·direction`.
pub fn is_effective<R: Real>(
    sys: &RootSystemData,
    ctx: &EffectivityContext<R>,
    v: &LatticeVector,
    c: &LatticeVector,
) -> Result<bool> {
    sys.check_dim(v)?;
    sys.check_dim(c)?;
    let zp = ctx.perturbed();
    let zv = zp.eval(v);
    if zv.re.is_zero_tol(zp.tol()) && zv.im.is_zero_tol(zp.tol()) {
        return Err(Error::DegenerateCharge("Z(v) = 0 at the perturbed charge"));
    }
    effective_at(sys, &zp, &zv, c)
}

/// Effective pair `(B, A)` with `B + A = v`, the sub-class `B` having the
/// larger phase at the perturbed charge.
pub fn jh_decomposition<R: Real>(
    sys: &RootSystemData,
    ctx: &EffectivityContext<R>,
    h: &Rank2WallLattice,
    n_bound: i64,
) -> Result<(LatticeVector, LatticeVector)> {
    let v = &h.v;
    let zp = ctx.perturbed();
    let zv = zp.eval(v);
    if zv.re.is_zero_tol(zp.tol()) && zv.im.is_zero_tol(zp.tol()) {
        return Err(Error::DegenerateCharge("Z(v) = 0 at the perturbed charge"));
    }
    let pairs: Vec<(LatticeVector, LatticeVector)> = match h.kind {
        WallKind::DegenerateRadical => return Err(Error::NoDecomposition),
        WallKind::SphericalPair(_) => {
            let s = spherical_classes_in(h, 0);
            s.iter()
                .filter_map(|c| {
                    let d = v - c;
                    (c < &d && s.contains(&d)).then(|| (c.clone(), d))
                })
                .collect()
        }
        WallKind::RadicalPlusSpherical => (-n_bound..=n_bound)
            .map(|n| (&h.w + &(n * v), &((1 - n) * v) - &h.w))
            .collect(),
    };
    let mut effective = Vec::new();
    for (c, d) in pairs {
        if effective_at(sys, &zp, &zv, &c)? && effective_at(sys, &zp, &zv, &d)? {
            effective.push((c, d));
        }
    }
    match effective.len() {
        0 => Err(Error::NoDecomposition),
        1 => {
            let (c, d) = effective.pop().expect("one pair");
            if cross(&zp.eval(&c), &zp.eval(&d)).is_pos(0.0) {
                Ok((c, d))
            } else {
                Ok((d, c))
            }
        }
        k => Err(Error::AmbiguousDecomposition(k)),
    }
}

/// Effective `N` values for `w + N·v` on the radical wall, for diagnostics.
pub fn radical_wall_integers<R: Real>(
    sys: &RootSystemData,
    ctx: &EffectivityContext<R>,
    h: &Rank2WallLattice,
    n_bound: i64,
) -> Result<Vec<i64>> {
    let v = &h.v;
    let mut out = Vec::new();
    for n in -n_bound..=n_bound {
        let c = &h.w + &(n * v);
        let d = &((1 - n) * v) - &h.w;
        if is_effective(sys, ctx, v, &c)? && is_effective(sys, ctx, v, &d)? {
            out.push(n);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallCrossingEvent {
    pub t: f64,
    /// Set when the wall parameter is rational and both endpoints are exact.
    pub t_exact: Option<Rational>,
    pub wall_lattice: Rank2WallLattice,
    pub decomposition: Option<(LatticeVector, LatticeVector)>,
}

impl WallCrossingEvent {
    pub fn partner(&self) -> &LatticeVector {
        &self.wall_lattice.w
    }
}

/// Key identifying the rational span of `{v, w}`.
pub fn span_key(v: &LatticeVector, w: &LatticeVector) -> Vec<Rational> {
    let m = RatMatrix::from_rows(&[v.to_rational(), w.to_rational()]);
    let (r, _) = linalg::rref(&m);
    r.to_rows().concat()
}

/// Genuine wall partners of `v` among real roots with `|m| <= m_bound`,
/// `|n| <= n_bound`.
pub fn wall_candidates(
    sys: &RootSystemData,
    v: &LatticeVector,
    m_bound: i64,
    n_bound: i64,
) -> Result<Vec<Rank2WallLattice>> {
    sys.check_dim(v)?;
    let g = v.content();
    if g != 1 {
        return Err(Error::NotPrimitive(g));
    }
    let roots = sys.enumerate_roots(m_bound, n_bound)?;
    Ok(roots
        .par_iter()
        .filter_map(|w| {
            classify_wall_lattice(sys, v, w)
                .ok()
                .filter(Rank2WallLattice::is_wall)
        })
        .collect())
}

enum Root {
    Exact(Rational),
    Irrational(f64),
}

fn endpoint_error(w: &LatticeVector) -> Error {
    Error::EndpointOnWall(w.coords().to_vec())
}

/// Simple roots in `(0, 1)` of `A t² + B t + C` with exact coefficients.
/// Double roots do not change the sign and are skipped.
fn exact_roots(a: Rational, b: Rational, c: Rational) -> Option<Vec<Root>> {
    let zero = Rational::zero();
    let one = Rational::one();
    if c.is_zero() || (a + b + c).is_zero() {
        return None;
    }
    let inside = |t: &Rational| *t > zero && *t < one;
    if a.is_zero() {
        if b.is_zero() {
            return Some(vec![]);
        }
        let t = -c / b;
        return Some(if inside(&t) { vec![Root::Exact(t)] } else { vec![] });
    }
    let disc = b * b - Rational::from_integer(4) * a * c;
    if disc <= zero {
        return Some(vec![]);
    }
    let two_a = Rational::from_integer(2) * a;
    if let Some(s) = rational_sqrt(&disc) {
        let mut ts = vec![(-b - s) / two_a, (-b + s) / two_a];
        ts.sort();
        return Some(ts.into_iter().filter(inside).map(Root::Exact).collect());
    }
    // roots tv ± s with s² = disc / 4a², located by exact comparisons
    let tv = -b / two_a;
    let s2 = disc / (two_a * two_a);
    let lo_in = tv > zero && s2 < tv * tv && (tv < one || s2 > (tv - one) * (tv - one));
    let hi_in = tv < one && s2 < (one - tv) * (one - tv) && (tv > zero || s2 > tv * tv);
    let (lo, hi) = float_pair(Real::to_f64(&a), Real::to_f64(&b), Real::to_f64(&c));
    let mut out = Vec::new();
    if lo_in {
        out.push(Root::Irrational(lo));
    }
    if hi_in {
        out.push(Root::Irrational(hi));
    }
    Some(out)
}

/// Both roots of a quadratic with positive discriminant, ascending.
fn float_pair(a: f64, b: f64, c: f64) -> (f64, f64) {
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let q = -0.5 * (b + b.signum().max(0.0).mul_add(2.0, -1.0) * disc.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Roots in `(0, 1)` for float coefficients; `None` flags a root at, or
/// within the margin of, an endpoint.
fn float_roots(a: f64, b: f64, c: f64) -> Option<Vec<f64>> {
    let scale = a.abs() + b.abs() + c.abs();
    if scale == 0.0 {
        return None;
    }
    let tol = WALL_TOLERANCE * scale;
    if c.abs() <= tol || (a + b + c).abs() <= tol {
        return None;
    }
    let roots: Vec<f64> = if a.abs() <= tol {
        if b.abs() <= tol {
            vec![]
        } else {
            vec![-c / b]
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc <= WALL_TOLERANCE * scale * scale {
            vec![]
        } else {
            let (lo, hi) = float_pair(a, b, c);
            vec![lo, hi]
        }
    };
    let mut out = Vec::new();
    for t in roots {
        if t.abs() < ENDPOINT_MARGIN || (t - 1.0).abs() < ENDPOINT_MARGIN {
            return None;
        }
        if t > 0.0 && t < 1.0 {
            out.push(t);
        }
    }
    Some(out)
}

/// Coefficients of `f(t) = im(Z_t(w)·conj(Z_t(v)))` along `Z_t = P + tD`.
fn wall_coefficients<R: Real>(
    zs: &Charge<R>,
    ze: &Charge<R>,
    v: &LatticeVector,
    w: &LatticeVector,
) -> (R, R, R) {
    let (pv, pw) = (zs.eval(v), zs.eval(w));
    let dv = ze.eval(v) - pv.clone();
    let dw = ze.eval(w) - pw.clone();
    let c = cross(&pw, &pv);
    let b = cross(&pw, &dv) + cross(&dw, &pv);
    let a = cross(&dw, &dv);
    (a, b, c)
}

fn check_endpoint<R: Real>(sys: &RootSystemData, z: &Charge<R>) -> Result<()> {
    if !z.is_normalized(sys) || !z.zb(sys).im.is_pos(z.tol()) {
        return Err(Error::NotInE);
    }
    Ok(())
}

fn interpolate<R: Real>(zs: &Charge<R>, ze: &Charge<R>, t: &R) -> (Charge<R>, Charge<R>) {
    let tc = Complex::new(t.clone(), R::zero());
    let values = zs
        .values()
        .iter()
        .zip(ze.values())
        .map(|(a, b)| a.clone() + (b.clone() - a.clone()) * tc.clone())
        .collect();
    let dir = zs
        .values()
        .iter()
        .zip(ze.values())
        .map(|(a, b)| b.clone() - a.clone())
        .collect();
    (
        Charge::new(values).with_tolerance(zs.tol()),
        Charge::new(dir).with_tolerance(zs.tol()),
    )
}

fn decompose_at<R: Real>(
    sys: &RootSystemData,
    zs: &Charge<R>,
    ze: &Charge<R>,
    t: R,
    h: &Rank2WallLattice,
    n_bound: i64,
) -> Option<(LatticeVector, LatticeVector)> {
    let (z, side_direction) = interpolate(zs, ze, &t);
    let ctx = EffectivityContext {
        z,
        side_direction,
        epsilon: R::from_rational(&Rational::new(1, 10_000_000)),
    };
    jh_decomposition(sys, &ctx, h, n_bound).ok()
}

/// Walls for `v` crossed by the segment from `zs` to `ze`, sorted by `t`
/// and then by partner.
///
/// Partners are real roots within the `(m, n)` window. Partners spanning
/// the same plane with `v` define the same wall; each wall is reported
/// once with its lexicographically smallest partner.
pub fn scan_walls_along_path(
    sys: &RootSystemData,
    v: &LatticeVector,
    zs: &CentralCharge,
    ze: &CentralCharge,
    m_bound: i64,
    n_bound: i64,
) -> Result<Vec<WallCrossingEvent>> {
    let candidates = wall_candidates(sys, v, m_bound, n_bound)?;
    let mut events: Vec<WallCrossingEvent> = match (zs, ze) {
        (CentralCharge::Exact(a), CentralCharge::Exact(b)) => {
            check_endpoint(sys, a)?;
            check_endpoint(sys, b)?;
            if a == b {
                return Ok(Vec::new());
            }
            let per: Vec<Result<Vec<WallCrossingEvent>>> = candidates
                .par_iter()
                .map(|h| {
                    let (qa, qb, qc) = wall_coefficients(a, b, v, &h.w);
                    let roots = exact_roots(qa, qb, qc).ok_or_else(|| endpoint_error(&h.w))?;
                    Ok(roots
                        .into_iter()
                        .map(|r| match r {
                            Root::Exact(t) => WallCrossingEvent {
                                t: Real::to_f64(&t),
                                t_exact: Some(t),
                                decomposition: decompose_at(sys, a, b, t, h, n_bound),
                                wall_lattice: h.clone(),
                            },
                            Root::Irrational(t) => WallCrossingEvent {
                                t,
                                t_exact: None,
                                decomposition: decompose_at(
                                    sys,
                                    &a.to_float(),
                                    &b.to_float(),
                                    t,
                                    h,
                                    n_bound,
                                ),
                                wall_lattice: h.clone(),
                            },
                        })
                        .collect())
                })
                .collect();
            flatten(per)?
        }
        _ => {
            let a = zs.to_float();
            let b = ze.to_float();
            check_endpoint(sys, &a)?;
            check_endpoint(sys, &b)?;
            if a.max_abs_diff(&b) == 0.0 {
                return Ok(Vec::new());
            }
            let per: Vec<Result<Vec<WallCrossingEvent>>> = candidates
                .par_iter()
                .map(|h| {
                    let (qa, qb, qc) = wall_coefficients(&a, &b, v, &h.w);
                    let roots = float_roots(qa, qb, qc).ok_or_else(|| endpoint_error(&h.w))?;
                    Ok(roots
                        .into_iter()
                        .map(|t| WallCrossingEvent {
                            t,
                            t_exact: None,
                            decomposition: decompose_at(sys, &a, &b, t, h, n_bound),
                            wall_lattice: h.clone(),
                        })
                        .collect())
                })
                .collect();
            flatten(per)?
        }
    };
    events.sort_by(|x, y| {
        x.t.total_cmp(&y.t)
            .then_with(|| x.wall_lattice.w.cmp(&y.wall_lattice.w))
    });
    Ok(dedupe_by_span(v, events))
}

fn flatten(per: Vec<Result<Vec<WallCrossingEvent>>>) -> Result<Vec<WallCrossingEvent>> {
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// Keeps the smallest partner per (span, crossing) pair. Events are sorted
/// by `(t, partner)`, so the first one seen in each group is kept.
fn dedupe_by_span(v: &LatticeVector, events: Vec<WallCrossingEvent>) -> Vec<WallCrossingEvent> {
    let mut groups: BTreeMap<Vec<Rational>, Vec<WallCrossingEvent>> = BTreeMap::new();
    for e in events {
        let key = span_key(v, &e.wall_lattice.w);
        let bucket = groups.entry(key).or_default();
        let same = bucket.iter_mut().find(|x| match (&x.t_exact, &e.t_exact) {
            (Some(p), Some(q)) => p == q,
            _ => (x.t - e.t).abs() <= 1e-9,
        });
        match same {
            Some(x) if e.wall_lattice.w < x.wall_lattice.w => *x = e,
            Some(_) => {}
            None => bucket.push(e),
        }
    }
    let mut out: Vec<WallCrossingEvent> = groups.into_values().flatten().collect();
    out.sort_by(|x, y| {
        x.t.total_cmp(&y.t)
            .then_with(|| x.wall_lattice.w.cmp(&y.wall_lattice.w))
    });
    out
}

/// Smallest `|im(Z(w)/Z(v))|` over genuine partners in the window.
pub fn genericity_margin(
    sys: &RootSystemData,
    v: &LatticeVector,
    z: &CentralCharge,
    m_bound: i64,
    n_bound: i64,
) -> Result<f64> {
    let candidates = wall_candidates(sys, v, m_bound, n_bound)?;
    let zf = z.to_float();
    let zv = zf.eval(v);
    let nv = zv.norm_sqr();
    if nv == 0.0 {
        return Err(Error::DegenerateCharge("Z(v) = 0"));
    }
    Ok(candidates
        .iter()
        .map(|h| (cross(&zf.eval(&h.w), &zv) / nv).abs())
        .fold(f64::INFINITY, f64::min))
}

/// True iff no genuine partner in the window has `im(Z(w)/Z(v)) = 0`.
/// This bounded check is a semi-decision.
pub fn is_generic(
    sys: &RootSystemData,
    v: &LatticeVector,
    z: &CentralCharge,
    m_bound: i64,
    n_bound: i64,
) -> Result<bool> {
    let candidates = wall_candidates(sys, v, m_bound, n_bound)?;
    Ok(match z {
        CentralCharge::Exact(z) => {
            let zv = z.eval(v);
            candidates.iter().all(|h| !cross(&z.eval(&h.w), &zv).is_zero())
        }
        CentralCharge::Float(z) => {
            let zv = z.eval(v);
            let tol = z.tol();
            candidates.iter().all(|h| {
                let zw = z.eval(&h.w);
                cross(&zw, &zv).abs() > tol * zw.norm() * zv.norm()
            })
        }
    })
}

/// Coprime `(x, y)`, `y > 0`, with `|x·Za + y·Zb| < ε·|Za|` from the
/// continued-fraction convergents of `θ = -Zb/Za`. Exact inputs return
/// the exact zero at the end of the expansion.
pub fn radical_violation_witness<R: Real>(
    za: &Complex<R>,
    zb: &Complex<R>,
    epsilon: f64,
) -> Result<(i128, i128)> {
    let tol = if R::EXACT { 0.0 } else { WALL_TOLERANCE };
    let n2 = za.re.clone() * za.re.clone() + za.im.clone() * za.im.clone();
    if n2.is_zero_tol(tol * tol) {
        return Err(Error::DegenerateCharge("Z(a) = 0"));
    }
    // θ = -Zb/Za must be real
    let re = -dot(zb, za) / n2.clone();
    let im = -cross(zb, za) / n2;
    if !im.is_zero_tol(tol) {
        return Err(Error::DegenerateCharge("Z(b)/Z(a) is not real"));
    }
    match re.to_rational() {
        Some(q) => Ok((*q.numer(), *q.denom())),
        None => Ok(float_convergent(re.to_f64(), epsilon)),
    }
}

fn float_convergent(theta: f64, epsilon: f64) -> (i128, i128) {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, theta.floor() as i128, 1i128);
    let mut x = theta;
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if ((p1 as f64) - (q1 as f64) * theta).abs() < epsilon || frac <= f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as i128;
        frac = x - x.floor();
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    (p1, q1)
}

/// Serializable mirror of an event.
#[derive(Clone, Debug, Serialize)]
pub struct EventRecord {
    pub t: String,
    pub partner: Vec<i64>,
    pub kind: String,
    pub sub: Option<Vec<i64>>,
    pub quotient: Option<Vec<i64>>,
}

impl From<&WallCrossingEvent> for EventRecord {
    fn from(e: &WallCrossingEvent) -> Self {
        EventRecord {
            t: format_t(e),
            partner: e.partner().coords().to_vec(),
            kind: e.wall_lattice.kind.to_string(),
            sub: e.decomposition.as_ref().map(|d| d.0.coords().to_vec()),
            quotient: e.decomposition.as_ref().map(|d| d.1.coords().to_vec()),
        }
    }
}

fn format_t(e: &WallCrossingEvent) -> String {
    match &e.t_exact {
        Some(q) => crate::rational::format_rational(q),
        None => format!("{}", crate::rational::round_sig12(e.t)),
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(";")
}

/// CSV with columns `t, partner, kind, sub, quotient`.
pub fn events_to_csv(events: &[WallCrossingEvent]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["t", "partner", "kind", "sub", "quotient"]).map_err(io)?;
    for e in events {
        let r = EventRecord::from(e);
        w.write_record([
            r.t,
            join(&r.partner),
            r.kind,
            r.sub.as_deref().map(join).unwrap_or_default(),
            r.quotient.as_deref().map(join).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge_domains::{charge_from_affine_values, sample_interior_charge, ExactCharge};
    use crate::k_model::z0_charge;
    use crate::rational::{cx, rat, rint};
    use crate::root_lattice::{build_system, WeightSignature};
    use crate::weyl_action;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e6() -> RootSystemData {
        build_system(&WeightSignature::new(&[3, 3, 3]).unwrap()).unwrap()
    }

    #[test]
    fn lattice_kinds() {
        let s = e6();
        let h = classify_wall_lattice(&s, &s.unit(1), &s.unit(2)).unwrap();
        assert_eq!(h.kind, WallKind::SphericalPair(1));
        let h = classify_wall_lattice(&s, s.b(), &s.unit(1)).unwrap();
        assert_eq!(h.kind, WallKind::RadicalPlusSpherical);
        let h = classify_wall_lattice(&s, s.a(), s.b()).unwrap();
        assert_eq!(h.kind, WallKind::DegenerateRadical);
        assert!(!h.is_wall());
        assert_eq!(
            classify_wall_lattice(&s, &(2 * &s.unit(1)), &s.unit(2)),
            Err(Error::NotPrimitive(2))
        );
        assert_eq!(
            classify_wall_lattice(&s, &s.unit(1), &-&s.unit(1)),
            Err(Error::LinearlyDependent)
        );
    }

    fn brute_spherical(s: &RootSystemData, h: &Rank2WallLattice) -> Vec<LatticeVector> {
        let mut out = Vec::new();
        for x in -10..=10 {
            for y in -10..=10 {
                let c = &(x * &h.v) + &(y * &h.w);
                if mukai(s, &c, &c).unwrap() == -2 {
                    out.push(c);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn spherical_enumeration_matches_brute_force() {
        for sig in WeightSignature::elliptic_signatures() {
            let s = build_system(&sig).unwrap();
            let mut kinds = std::collections::BTreeSet::new();
            for i in 0..s.rank() {
                for j in 0..s.rank() {
                    if i == j {
                        continue;
                    }
                    for sign in [1, -1] {
                        let w = sign * &s.unit(j);
                        let Ok(h) = classify_wall_lattice(&s, &s.unit(i), &w) else {
                            continue;
                        };
                        if let WallKind::SphericalPair(k) = h.kind {
                            kinds.insert(k);
                            assert_eq!(spherical_classes_in(&h, 10), brute_spherical(&s, &h));
                        }
                    }
                }
            }
            assert_eq!(kinds.len(), 3);
        }
        let s = e6();
        let h = classify_wall_lattice(&s, &s.unit(2), &s.unit(4)).unwrap();
        assert_eq!(h.kind, WallKind::SphericalPair(0));
        assert_eq!(spherical_classes_in(&h, 0).len(), 4);
        let h = classify_wall_lattice(&s, s.b(), &s.unit(1)).unwrap();
        assert_eq!(spherical_classes_in(&h, 3).len(), 14);
    }

    fn ctx_from(z: ExactCharge, dir: ExactCharge) -> EffectivityContext<Rational> {
        EffectivityContext {
            z,
            side_direction: dir,
            epsilon: rat(1, 1000),
        }
    }

    /// `Z(α_0) = i`, `Z(α_{(1,1)}) = i/2`; the direction rotates `α_{(1,1)}` up.
    fn pair_wall() -> (RootSystemData, EffectivityContext<Rational>) {
        let s = e6();
        let mut affine = vec![cx(rint(0), rint(1)), cx(rint(0), rat(1, 2))];
        affine.extend(vec![cx(rat(-1, 3), rint(1)); 5]);
        let z = charge_from_affine_values(affine);
        let mut dir = vec![cx(rint(0), rint(0)); 8];
        dir[2] = cx(rat(-1, 2), rint(0));
        (s, ctx_from(z, ExactCharge::new(dir)))
    }

    #[test]
    fn effectivity_and_pair_decomposition() {
        let (s, ctx) = pair_wall();
        let v = &s.unit(1) + &s.unit(2);
        assert!(is_effective(&s, &ctx, &v, &s.unit(2)).unwrap());
        assert!(is_effective(&s, &ctx, &v, &v).unwrap());
        assert!(!is_effective(&s, &ctx, &v, &(&s.unit(2) + &s.unit(4))).unwrap());
        let h = classify_wall_lattice(&s, &v, &s.unit(2)).unwrap();
        let (b, a) = jh_decomposition(&s, &ctx, &h, 10).unwrap();
        assert_eq!((b, a), (s.unit(2), s.unit(1)));
        // opposite side swaps the order
        let mut other = ctx.clone();
        other.epsilon = -other.epsilon;
        assert_eq!(
            jh_decomposition(&s, &other, &h, 10).unwrap(),
            (s.unit(1), s.unit(2))
        );
    }

    #[test]
    fn orthogonal_pair_has_no_decomposition() {
        let (s, ctx) = pair_wall();
        let h = classify_wall_lattice(&s, &s.unit(1), &s.unit(3)).unwrap();
        assert_eq!(h.kind, WallKind::SphericalPair(0));
        assert_eq!(jh_decomposition(&s, &ctx, &h, 10), Err(Error::NoDecomposition));
    }

    #[test]
    fn radical_wall_has_unique_integer() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            // Z(α_0) = λ·τ puts α_0 on the wall of b
            let mut affine: Vec<Complex<Rational>> = (0..7)
                .map(|_| cx(rat(rng.gen_range(-6..6), 4), rat(rng.gen_range(1..6), 3)))
                .collect();
            let lam = rat(rng.gen_range(-9..9), rng.gen_range(1..5));
            if lam * rint(3) == rint(1) {
                continue;
            }
            affine[0] = cx(rint(0), rint(0));
            let rest = charge_from_affine_values(affine.clone()).zb(&s);
            let tau = rest / cx(rint(1) - lam * rint(3), rint(0));
            affine[0] = tau * cx(lam, rint(0));
            let z = charge_from_affine_values(affine);
            if z.zb(&s).im <= rint(0) {
                continue;
            }
            let h = classify_wall_lattice(&s, s.b(), &s.unit(1)).unwrap();
            let dir = ExactCharge::new(
                (0..8).map(|_| cx(rat(rng.gen_range(-5..5), 3), rat(rng.gen_range(-5..5), 3))).collect(),
            );
            for sign in [1, -1] {
                let ctx = EffectivityContext { z: z.clone(), side_direction: dir.clone(), epsilon: rat(sign, 1000) };
                let ns = radical_wall_integers(&s, &ctx, &h, 20).unwrap();
                assert_eq!(ns.len(), 1, "λ = {lam}");
                let (p, q) = jh_decomposition(&s, &ctx, &h, 20).unwrap();
                assert_eq!(&p + &q, *s.b());
            }
        }
    }

    #[test]
    fn witness_examples() {
        let one = cx(rint(1), rint(0));
        assert_eq!(radical_violation_witness(&one, &cx(rint(-2), rint(0)), 1e-6).unwrap(), (2, 1));
        assert_eq!(radical_violation_witness(&one, &cx(rat(-1, 3), rint(0)), 1e-6).unwrap(), (1, 3));
        let r2 = 2f64.sqrt();
        assert_eq!(
            radical_violation_witness(&Complex::new(1.0, 0.0), &Complex::new(-r2, 0.0), 0.01).unwrap(),
            (99, 70)
        );
    }

    #[test]
    fn genericity() {
        let (s, ctx) = pair_wall();
        let v = &s.unit(1) + &s.unit(2);
        assert!(!is_generic(&s, &v, &CentralCharge::Exact(ctx.z.clone()), 1, 1).unwrap());
        let z0 = CentralCharge::Exact(z0_charge(&s));
        assert!(!is_generic(&s, s.b(), &z0, 2, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let affine: Vec<Complex<f64>> = (0..7)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.1..1.0)))
            .collect();
        let zf = CentralCharge::Float(charge_from_affine_values(affine));
        assert!(is_generic(&s, &s.unit(1), &zf, 5, 5).unwrap());
        let margin = genericity_margin(&s, &s.unit(1), &zf, 2, 2).unwrap();
        assert!(margin > 0.0);
    }

    #[test]
    fn scan_constant_and_reflected_paths() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = sample_interior_charge(&s, &mut rng);
        let zc = CentralCharge::Exact(z.clone());
        assert!(scan_walls_along_path(&s, &s.unit(1), &zc, &zc, 1, 1).unwrap().is_empty());
        let w0 = weyl_action::simple_reflection(&s, crate::root_lattice::BasisLabel::V0).unwrap();
        let wz = CentralCharge::Exact(z.act(&s, &w0).unwrap());
        let events = scan_walls_along_path(&s, &s.unit(1), &zc, &wz, 1, 1).unwrap();
        assert!(!events.is_empty());
        let rev = scan_walls_along_path(&s, &s.unit(1), &wz, &zc, 1, 1).unwrap();
        let key = |e: &WallCrossingEvent, flip: bool| {
            let t = e.t_exact.expect("rational crossing");
            (if flip { rint(1) - t } else { t }, span_key(&s.unit(1), e.partner()))
        };
        let mut fwd: Vec<_> = events.iter().map(|e| key(e, false)).collect();
        let mut bwd: Vec<_> = rev.iter().map(|e| key(e, true)).collect();
        fwd.sort();
        bwd.sort();
        assert_eq!(fwd, bwd);
        let csv = events_to_csv(&events).unwrap();
        assert!(csv.starts_with("t,partner,kind,sub,quotient\n"));
        assert_eq!(csv.lines().count(), events.len() + 1);
    }

    #[test]
    fn scan_rejects_endpoint_on_wall() {
        let (s, ctx) = pair_wall();
        let v = &s.unit(1) + &s.unit(2);
        let zs = CentralCharge::Exact(ctx.z.clone());
        let ze = CentralCharge::Exact(ctx.perturbed());
        assert!(matches!(
            scan_walls_along_path(&s, &v, &zs, &ze, 1, 1),
            Err(Error::EndpointOnWall(_))
        ));
    }

    #[test]
    fn quadratic_root_location() {
        // (t - 1/3)(t - 2/3): rational roots
        let r = exact_roots(rint(9), rint(-9), rint(2)).unwrap();
        assert_eq!(r.len(), 2);
        // t² - 1/2: root 1/√2 in (0, 1), -1/√2 outside
        let r = exact_roots(rint(1), rint(0), rat(-1, 2)).unwrap();
        assert_eq!(r.len(), 1);
        match r[0] {
            Root::Irrational(t) => assert!((t - 0.5f64.sqrt()).abs() < 1e-12),
            Root::Exact(_) => panic!("irrational root expected"),
        }
        // tangent at 1/2 is skipped
        assert!(exact_roots(rint(4), rint(-4), rint(1)).unwrap().is_empty());
        assert!(exact_roots(rint(1), rint(-1), rint(0)).is_none());
        let f = float_roots(1.0, 0.0, -0.5).unwrap();
        assert_eq!(f.len(), 1);
    }
}
