//! The acceptance suite shared by `ellwall verify all` and the test target.
//!
//! Each check returns a one-line detail on success or a reason on failure,
//! and fails as well when it exceeds its time budget.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charge_domains::{
    c_action, charge_from_affine_values, is_regular, reduce_to_d, sample_e_charge,
    sample_interior_charge, sample_word, CentralCharge, ExactCharge, FloatCharge,
    DEFAULT_ITERATION_CAP,
};
use crate::error::Error;
use crate::k_model::{br_to_weyl, is_positive_root, weyl_image, z0_charge, PiGenerator, TwistSymbol, TwistWord};
use crate::linalg::IntMatrix;
use crate::oracle;
use crate::rational::{complex_to_f64, rat, Rational};
use crate::root_lattice::{build_system, BasisLabel, LatticeVector, RootSystemData, WeightSignature};
use crate::walls::{
    classify_wall_lattice, radical_violation_witness, radical_wall_integers,
    scan_walls_along_path, span_key, spherical_classes_in, EffectivityContext, WallKind,
};
use crate::weyl_action::{artin_relation_report, phi_hom, r_element_recursive};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub signatures: Vec<WeightSignature>,
    pub seed: u64,
    /// Negative control: break the Gram matrix before running.
    pub corrupt_gram: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            signatures: WeightSignature::elliptic_signatures(),
            seed: 0,
            corrupt_gram: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CheckReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.3} s, limit {} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

type Outcome = std::result::Result<String, String>;
type Check = fn(&[RootSystemData], &mut ChaCha8Rng) -> Outcome;

/// `(title, per-system time budget in seconds, check)`.
const CHECKS: [(&str, u64, Check); 13] = [
    ("gram construction", 1, gram_construction),
    ("finite root counts", 5, finite_root_counts),
    ("r_v coherence", 1, r_coherence),
    ("phi homomorphism and kernel", 1, phi_homomorphism),
    ("Artin relations", 1, artin_relations),
    ("fundamental-domain round trip", 30, round_trip),
    ("regular-set equivalence", 60, regular_equivalence),
    ("spherical enumeration", 5, spherical_enumeration),
    ("radical wall uniqueness", 10, radical_uniqueness),
    ("wall-scan oracle agreement", 120, scan_agreement),
    ("slope-charge facts", 5, slope_charge),
    ("deck-action shadow", 5, deck_action),
    ("Dirichlet witness", 1, dirichlet_witness),
];

/// Budgets are stated per system for counts and per run otherwise.
fn limit_for(id: usize, systems: usize) -> Duration {
    let secs = CHECKS[id - 1].1;
    Duration::from_secs(if id == 2 { secs * systems as u64 } else { secs })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckReport> {
    let mut systems = Vec::new();
    for sig in &cfg.signatures {
        match build_system(sig) {
            Ok(s) => systems.push(if cfg.corrupt_gram { s.with_corrupted_gram() } else { s }),
            Err(e) => {
                return vec![CheckReport {
                    id: 1,
                    title: CHECKS[0].0,
                    pass: false,
                    detail: e.to_string(),
                    elapsed: Duration::ZERO,
                    limit: limit_for(1, 1),
                }]
            }
        }
    }
    let mut reports: Vec<CheckReport> = Vec::new();
    for (i, (title, _, check)) in CHECKS.iter().enumerate() {
        let id = i + 1;
        let limit = limit_for(id, systems.len());
        if id > 1 && !reports[0].pass {
            reports.push(CheckReport {
                id,
                title,
                pass: false,
                detail: "not run: Gram construction check failed".into(),
                elapsed: Duration::ZERO,
                limit,
            });
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(id as u64));
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&systems, &mut rng)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if pass && elapsed > limit {
            pass = false;
            detail = format!("{detail}; over time budget");
        }
        reports.push(CheckReport { id, title, pass, detail, elapsed, limit });
    }
    reports
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn name(sys: &RootSystemData) -> String {
    let w: Vec<String> = sys.signature().weights().iter().map(u32::to_string).collect();
    format!("({})", w.join(","))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Symmetric elimination over `Q`: a zero pivot must have a zero row.
fn is_psd_exact(g: &IntMatrix) -> bool {
    let n = g.rows();
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from_integer(*g.get(i, j) as i128)).collect())
        .collect();
    for k in 0..n {
        let d = m[k][k];
        if d < Rational::zero() {
            return false;
        }
        if d.is_zero() {
            if (k..n).any(|j| !m[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        let pivot = m[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            let f = row[k] / d;
            for (x, p) in row.iter_mut().zip(&pivot).skip(k) {
                *x -= f * p;
            }
        }
    }
    true
}

fn gram_construction(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    for s in systems {
        let g = s.gram();
        ensure(is_psd_exact(g), || format!("{}: Gram matrix not positive semidefinite", name(s)))?;
        ensure(s.radical_rank() == 2, || {
            format!("{}: kernel rank {}", name(s), s.radical_rank())
        })?;
        for (label, v) in [("a", s.a()), ("b", s.b())] {
            ensure(g.mul_vec(v.coords()).iter().all(|&x| x == 0), || {
                format!("{}: {label} not in the kernel", name(s))
            })?;
        }
        ensure(s.radical_frame_saturated(), || format!("{}: radical frame not saturated", name(s)))?;
    }
    Ok(format!("{} systems, PSD with kernel rank 2", systems.len()))
}

fn expected_count(s: &RootSystemData) -> Option<usize> {
    match s.signature().weights() {
        [3, 3, 3] => Some(72),
        [4, 4, 2] => Some(126),
        [6, 3, 2] => Some(240),
        [2, 2, 2, 2] => Some(24),
        _ => None,
    }
}

fn finite_root_counts(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    let mut counts = Vec::new();
    for s in systems {
        let start = Instant::now();
        let n = s.finite_root_count();
        let t = start.elapsed();
        ensure(t <= Duration::from_secs(5), || format!("{}: enumeration took {t:?}", name(s)))?;
        let orbit = oracle::finite_roots_by_orbit(s);
        let enumerated: BTreeSet<LatticeVector> = s.finite_roots().iter().cloned().collect();
        ensure(orbit == enumerated, || {
            format!("{}: enumeration ({n}) differs from orbit closure ({})", name(s), orbit.len())
        })?;
        if let Some(e) = expected_count(s) {
            ensure(n == e, || format!("{}: {n} roots, expected {e}", name(s)))?;
        }
        counts.push(format!("{}={n}", name(s)));
    }
    Ok(counts.join(" "))
}

fn r_coherence(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for s in systems {
        let n = s.rank();
        for &v in s.affine_labels() {
            let iv = s.index_of(v).expect("basis label");
            let a = s.a();
            // β ↦ β + I(β, α_v)·a
            let closed = IntMatrix::from_fn(n, n, |i, j| {
                i64::from(i == j) + a[i] * s.gram().get(iv, j)
            });
            let (m, m_inv) = r_element_recursive(s, v).map_err(|e| e.to_string())?;
            ensure(m == closed, || format!("{}: composite r_{v} differs from closed form", name(s)))?;
            ensure(m.mul_mat(&m_inv).is_identity(), || format!("{}: r_{v} inverse", name(s)))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} vertices, composite equals β + I(β,α_v)·a"))
}

fn random_affine_vector(s: &RootSystemData, rng: &mut ChaCha8Rng) -> LatticeVector {
    let mut x: Vec<i64> = (0..s.rank()).map(|_| rng.gen_range(-5..=5)).collect();
    x[0] = 0;
    LatticeVector(x)
}

fn phi_homomorphism(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    for s in systems {
        for _ in 0..1000 {
            let u = random_affine_vector(s, rng);
            let w = random_affine_vector(s, rng);
            let lhs = phi_hom(s, &(&u + &w)).map_err(|e| e.to_string())?;
            let rhs = phi_hom(s, &u)
                .and_then(|p| phi_hom(s, &w).map(|q| p.compose(&q)))
                .map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("{}: φ({u} + {w}) ≠ φ(u)φ(w)", name(s)))?;
        }
        let pb = phi_hom(s, s.b()).map_err(|e| e.to_string())?;
        ensure(pb.is_identity(), || format!("{}: φ(b) is not the identity", name(s)))?;
    }
    Ok(format!("{} pairs, φ(b) = id", 1000 * systems.len()))
}

fn artin_relations(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    let mut total = 0;
    for s in systems {
        let report = artin_relation_report(s);
        ensure(!report.is_empty(), || format!("{}: no relations checked", name(s)))?;
        if let Some(bad) = report.iter().find(|r| !r.pass) {
            return Err(format!("{}: {} fails for ({}, {})", name(s), bad.relation, bad.u, bad.v));
        }
        total += report.len();
    }
    Ok(format!("{total} relation instances hold"))
}

fn round_trip(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    let mut caps = 0;
    let mut worst = 0.0f64;
    for s in systems {
        for _ in 0..1000 {
            let z = sample_interior_charge(s, rng);
            let len = rng.gen_range(0..=10);
            let w = sample_word(s, rng, len);
            let moved = z.act_word(s, &w).map_err(|e| e.to_string())?;
            match reduce_to_d(s, &moved, DEFAULT_ITERATION_CAP) {
                Ok(r) => ensure(r.reduced == z, || format!("{}: exact reduction missed the start", name(s)))?,
                Err(Error::IterationCap(_)) => caps += 1,
                Err(e) => return Err(format!("{}: {e}", name(s))),
            }
            let zf = z.to_float();
            let moved_f = zf.act_word(s, &w).map_err(|e| e.to_string())?;
            match reduce_to_d(s, &moved_f, DEFAULT_ITERATION_CAP) {
                Ok(r) => {
                    let scale = zf.values().iter().map(|c| c.norm()).fold(1.0, f64::max);
                    let rel = r.reduced.max_abs_diff(&zf) / scale;
                    worst = worst.max(rel);
                    ensure(rel <= 1e-9, || format!("{}: float reduction off by {rel:e}", name(s)))?;
                }
                Err(Error::IterationCap(_)) => caps += 1,
                Err(e) => return Err(format!("{}: {e}", name(s))),
            }
        }
    }
    ensure(caps == 0, || format!("{caps} IterationCap events"))?;
    Ok(format!(
        "{} charges per backend, worst float error {worst:.1e}, 0 IterationCap",
        1000 * systems.len()
    ))
}

/// `Z(x) = p + q·Z_k` as a function of the value on basis vertex `k >= 1`,
/// with `Z(α_{-1}) = Z(α_0) - 1` tied to `k = 1`.
fn linear_in(z: &ExactCharge, x: &LatticeVector, k: usize) -> (Complex<Rational>, Rational) {
    let q = Rational::from_integer((x[k] + if k == 1 { x[0] } else { 0 }) as i128);
    let p = z.eval(x) - z.values()[k] * q;
    (p, q)
}

fn with_value(z: &ExactCharge, k: usize, value: Complex<Rational>) -> ExactCharge {
    let mut affine = z.values()[1..].to_vec();
    affine[k - 1] = value;
    charge_from_affine_values(affine)
}

/// Adjusts one basis value so that `Z(x) = target`, keeping `im τ > 0`.
fn force_value(
    s: &RootSystemData,
    z: &ExactCharge,
    x: &LatticeVector,
    target: Complex<Rational>,
    rng: &mut ChaCha8Rng,
) -> Option<ExactCharge> {
    let ks: Vec<usize> = (1..s.rank()).filter(|&k| !linear_in(z, x, k).1.is_zero()).collect();
    if ks.is_empty() {
        return None;
    }
    let k = ks[rng.gen_range(0..ks.len())];
    let (p, q) = linear_in(z, x, k);
    let out = with_value(z, k, (target - p) / q);
    (out.zb(s).im > Rational::zero()).then_some(out)
}

/// Random charge with small values on `Γ_a` and `Z(b)` drawn directly.
fn small_charge(s: &RootSystemData, rng: &mut ChaCha8Rng) -> ExactCharge {
    let small = |rng: &mut ChaCha8Rng| {
        let d = rng.gen_range(1..=8);
        rat(rng.gen_range(-d..=d), 4 * d)
    };
    let tau = Complex::new(rat(rng.gen_range(-8..=8), 4), rat(rng.gen_range(2..=8), 4));
    let ext = s.index_of(s.extremal_vertex()).expect("extremal vertex");
    let mut affine: Vec<Complex<Rational>> =
        (1..s.rank()).map(|_| Complex::new(small(rng), small(rng))).collect();
    affine[ext - 1] = Complex::new(Rational::zero(), Rational::zero());
    let rest = charge_from_affine_values(affine.clone()).zb(s);
    affine[ext - 1] = tau - rest;
    charge_from_affine_values(affine)
}

/// True when every `(m, n)` with `Z(α_f + m·b + n·a) = 0` is inside the
/// oracle window, by the bounds `|m| <= |im Z(α_f)|/im τ` and
/// `|n| <= |re Z(α_f)| + |m|·|re τ|`.
fn within_oracle_window(s: &RootSystemData, z: &ExactCharge, bound: f64) -> bool {
    let tau = complex_to_f64(&z.zb(s));
    s.finite_roots().iter().all(|f| {
        let zf = complex_to_f64(&z.eval(f));
        let m = zf.im.abs() / tau.im;
        m <= bound && zf.re.abs() + m * tau.re.abs() <= bound
    })
}

fn regular_equivalence(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    let mut singular = 0;
    for s in systems {
        let mut charges: Vec<(ExactCharge, &str)> = Vec::new();
        while charges.len() < 160 {
            let z = small_charge(s, rng);
            if within_oracle_window(s, &z, 49.0) {
                charges.push((z, "random"));
            }
        }
        let roots = s.finite_roots();
        while charges.len() < 200 {
            let f = &roots[rng.gen_range(0..roots.len())];
            let alpha = s.recompose(f, rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            let near = charges.len() >= 180;
            let target = if near {
                let d = rat(rng.gen_range(1..=9), 1_000_000);
                Complex::new(d, if rng.gen_bool(0.5) { d } else { Rational::zero() })
            } else {
                Complex::new(Rational::zero(), Rational::zero())
            };
            let base = small_charge(s, rng);
            let forced = force_value(s, &base, &alpha, target, rng);
            if let Some(z) = forced.filter(|z| !near || within_oracle_window(s, z, 49.0)) {
                ensure(z.eval(&alpha) == target, || "engineered value not attained".into())?;
                charges.push((z, if near { "near-miss" } else { "hit" }));
            }
        }
        for (z, kind) in &charges {
            let fast = is_regular(s, z).map_err(|e| format!("{}: {e}", name(s)))?;
            let brute = oracle::regular_by_brute_force(s, z, 50);
            ensure(fast == brute, || {
                format!("{}: solver says {fast}, oracle says {brute} on a {kind} charge", name(s))
            })?;
            if *kind == "hit" {
                ensure(!fast, || format!("{}: engineered zero not detected", name(s)))?;
            }
            singular += usize::from(!fast);
        }
    }
    Ok(format!("{} charges agree, {singular} singular", 200 * systems.len()))
}

fn spherical_enumeration(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    let mut per_kind = [0usize; 3];
    for s in systems {
        let mut seen = BTreeSet::new();
        for i in 0..s.rank() {
            for j in 0..s.rank() {
                for sign in [1, -1] {
                    let w = sign * &s.unit(j);
                    let Ok(h) = classify_wall_lattice(s, &s.unit(i), &w) else { continue };
                    let WallKind::SphericalPair(k) = h.kind else { continue };
                    seen.insert(k);
                    per_kind[(k + 1) as usize] += 1;
                    let fast = spherical_classes_in(&h, 10);
                    let brute = oracle::spherical_by_brute_force(s, &h, 10);
                    ensure(fast == brute, || {
                        format!("{}: mismatch for ({i}, {}{j})", name(s), if sign < 0 { "-" } else { "" })
                    })?;
                }
            }
        }
        ensure(seen.len() == 3, || format!("{}: only pairing types {seen:?} occur", name(s)))?;
    }
    Ok(format!(
        "pairs checked: k=-1: {}, k=0: {}, k=1: {}",
        per_kind[0], per_kind[1], per_kind[2]
    ))
}

/// A charge with `Z(w) = λ·Z(b)`, `λ` rational.
fn radical_wall_charge(
    s: &RootSystemData,
    w: &LatticeVector,
    rng: &mut ChaCha8Rng,
) -> (ExactCharge, Rational) {
    loop {
        let base = sample_e_charge(s, rng);
        let lam = rat(rng.gen_range(-12..=12), rng.gen_range(1..=4));
        let k = if w[0] != 0 { 1 } else { (1..s.rank()).find(|&k| w[k] != 0).expect("nonzero") };
        let (pw, qw) = linear_in(&base, w, k);
        let (pb, qb) = linear_in(&base, s.b(), k);
        let den = qw - lam * qb;
        if den.is_zero() {
            continue;
        }
        let z = with_value(&base, k, (pb * lam - pw) / den);
        if z.zb(s).im > Rational::zero() && z.eval(w) == z.zb(s) * lam {
            return (z, lam);
        }
    }
}

fn radical_uniqueness(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    let mut walls = 0;
    for s in systems {
        for j in 0..s.rank() {
            let w = s.unit(j);
            let h = classify_wall_lattice(s, s.b(), &w).map_err(|e| e.to_string())?;
            ensure(h.kind == WallKind::RadicalPlusSpherical, || "unexpected lattice type".into())?;
            for _ in 0..10 {
                let (z, lam) = radical_wall_charge(s, &w, rng);
                let dir = ExactCharge::new(
                    (0..s.rank())
                        .map(|_| Complex::new(rat(rng.gen_range(-9..=9), 4), rat(rng.gen_range(-9..=9), 4)))
                        .collect(),
                );
                for eps in [rat(1, 1000), rat(-1, 1000)] {
                    let ctx = EffectivityContext { z: z.clone(), side_direction: dir.clone(), epsilon: eps };
                    let ns = radical_wall_integers(s, &ctx, &h, 20).map_err(|e| e.to_string())?;
                    ensure(ns.len() == 1, || {
                        format!("{}: w = α_{}, λ = {lam}: N values {ns:?}", name(s), s.label(j))
                    })?;
                }
                walls += 1;
            }
        }
    }
    Ok(format!("{walls} wall charges, one N on each side"))
}

/// Small shifts with a large prime denominator keep endpoints off walls.
fn exact_path_charge(s: &RootSystemData, rng: &mut ChaCha8Rng) -> ExactCharge {
    let z = sample_e_charge(s, rng);
    let affine = z.values()[1..]
        .iter()
        .map(|c| c + Complex::new(rat(rng.gen_range(-400..=400), 7919), rat(rng.gen_range(0..=400), 7919)))
        .collect();
    charge_from_affine_values(affine)
}

fn float_path_charge(s: &RootSystemData, rng: &mut ChaCha8Rng) -> FloatCharge {
    let z = sample_e_charge(s, rng).to_float();
    let affine: Vec<Complex<f64>> = z.values()[1..]
        .iter()
        .map(|c| c + Complex::new(rng.gen_range(-0.05..0.05), rng.gen_range(0.0..0.05)))
        .collect();
    charge_from_affine_values(affine)
}

fn scan_agreement(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    let mut events = 0;
    for s in systems {
        let mut done = 0;
        while done < 20 {
            let v = if done % 4 == 3 { s.b().clone() } else { s.unit(rng.gen_range(0..s.rank())) };
            let (zs, ze) = if done % 2 == 0 {
                (
                    CentralCharge::Exact(exact_path_charge(s, rng)),
                    CentralCharge::Exact(exact_path_charge(s, rng)),
                )
            } else {
                (
                    CentralCharge::Float(float_path_charge(s, rng)),
                    CentralCharge::Float(float_path_charge(s, rng)),
                )
            };
            let scanned = match scan_walls_along_path(s, &v, &zs, &ze, 3, 3) {
                Ok(e) => e,
                Err(Error::EndpointOnWall(_)) => continue,
                Err(e) => return Err(format!("{}: {e}", name(s))),
            };
            let grid = oracle::grid_wall_oracle(s, &v, &zs.to_float(), &ze.to_float(), 3, 3, 10_000);
            let mut a: Vec<(Vec<Rational>, f64)> =
                scanned.iter().map(|e| (span_key(&v, e.partner()), e.t)).collect();
            let mut b: Vec<(Vec<Rational>, f64)> = grid.iter().map(|c| (c.key.clone(), c.t)).collect();
            a.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
            b.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
            ensure(a.len() == b.len(), || {
                format!("{}: path {done}: scan found {}, oracle {}", name(s), a.len(), b.len())
            })?;
            for (x, y) in a.iter().zip(&b) {
                ensure(x.0 == y.0 && (x.1 - y.1).abs() < 1e-6, || {
                    format!("{}: path {done}: crossing at t = {} vs {}", name(s), x.1, y.1)
                })?;
            }
            events += a.len();
            done += 1;
        }
    }
    Ok(format!("{} paths, {events} crossings matched", 20 * systems.len()))
}

fn slope_charge(systems: &[RootSystemData], _: &mut ChaCha8Rng) -> Outcome {
    let mut roots = 0;
    for s in systems {
        let z = z0_charge(s);
        let one = Complex::new(Rational::one(), Rational::zero());
        ensure(z.za(s) == one, || format!("{}: Z0(a) = {}", name(s), z.za(s)))?;
        let ratio = z.zb(s) / z.za(s);
        ensure(ratio.im == Rational::from_integer(s.m0() as i128), || {
            format!("{}: im(Z0(b)/Z0(a)) = {}", name(s), ratio.im)
        })?;
        for g in PiGenerator::all(s) {
            let c = z.eval(&g.class(s).map_err(|e| e.to_string())?);
            let ok = c.im > Rational::zero() || (c.im.is_zero() && c.re < Rational::zero());
            ensure(ok, || format!("{}: Z0({g}) = {c} outside H ∪ R<0", name(s)))?;
        }
        for alpha in s.enumerate_roots(5, 5).map_err(|e| e.to_string())? {
            let p = is_positive_root(s, &alpha).map_err(|e| e.to_string())?;
            let q = is_positive_root(s, &-&alpha).map_err(|e| e.to_string())?;
            ensure(p != q, || format!("{}: dichotomy fails for {alpha}", name(s)))?;
            roots += 1;
        }
        for m in -5i64..=5 {
            for n in -5i64..=5 {
                if (m, n) == (0, 0) {
                    continue;
                }
                let x = &(m * s.b()) + &(n * s.a());
                let p = is_positive_root(s, &x).map_err(|e| e.to_string())?;
                let q = is_positive_root(s, &-&x).map_err(|e| e.to_string())?;
                ensure(p != q, || format!("{}: dichotomy fails for {x}", name(s)))?;
                roots += 1;
            }
        }
    }
    Ok(format!("{roots} roots satisfy the positivity dichotomy"))
}

fn random_twist_word(s: &RootSystemData, rng: &mut ChaCha8Rng) -> TwistWord {
    let len = rng.gen_range(0..=8);
    TwistWord(
        (0..len)
            .map(|_| {
                let i = rng.gen_range(0..s.rank());
                let vertex = s.label(i);
                match (vertex, rng.gen_range(0..4)) {
                    (BasisLabel::VMinus1, 0 | 2) | (_, 0) => TwistSymbol::Twist { vertex },
                    (BasisLabel::VMinus1, _) | (_, 1) => TwistSymbol::TwistInverse { vertex },
                    (_, 2) => TwistSymbol::Rho { vertex },
                    _ => TwistSymbol::RhoInverse { vertex },
                }
            })
            .collect(),
    )
}

fn deck_action(systems: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    for s in systems {
        let z = CentralCharge::Exact(sample_e_charge(s, rng));
        ensure(c_action(Complex::new(2.0, 0.0), &z) == z, || format!("{}: c_action(2) ≠ id", name(s)))?;
        for _ in 0..100 {
            let w = random_twist_word(s, rng);
            let z = sample_e_charge(s, rng);
            let g = br_to_weyl(s, &w).map_err(|e| e.to_string())?;
            let lhs = z.act(s, g.matrix()).map_err(|e| e.to_string())?;
            let rhs = z.act_word(s, &weyl_image(&w)).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("{}: actions differ for a twist word of length {}", name(s), w.0.len()))?;
        }
    }
    Ok(format!("c_action(2) = id, {} twist words agree", 100 * systems.len()))
}

fn dirichlet_witness(_: &[RootSystemData], rng: &mut ChaCha8Rng) -> Outcome {
    let eps = 1e-6;
    let mut max_q = 0i128;
    for _ in 0..100 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let za: f64 = sign * rng.gen_range(0.1..10.0);
        let zb: f64 = rng.gen_range(-10.0..10.0);
        let (x, y) = radical_violation_witness(&Complex::new(za, 0.0), &Complex::new(zb, 0.0), eps)
            .map_err(|e| e.to_string())?;
        ensure(x.gcd(&y) == 1, || format!("({x}, {y}) not coprime"))?;
        let r = (x as f64 * za + y as f64 * zb).abs();
        ensure(r < eps * za.abs(), || format!("|{x}·{za} + {y}·{zb}| = {r:e}"))?;
        max_q = max_q.max(y.abs());
    }
    for _ in 0..100 {
        let za = rat(rng.gen_range(1..=50) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..=20));
        let zb = rat(rng.gen_range(-50..=50), rng.gen_range(1..=20));
        let zero = Rational::zero();
        let (x, y) = radical_violation_witness(&Complex::new(za, zero), &Complex::new(zb, zero), eps)
            .map_err(|e| e.to_string())?;
        ensure(x.gcd(&y) == 1, || format!("({x}, {y}) not coprime"))?;
        let r = Rational::from_integer(x) * za + Rational::from_integer(y) * zb;
        ensure(r.is_zero(), || format!("rational ratio {zb}/{za}: residual {r}"))?;
    }
    Ok(format!("100 float witnesses (largest y = {max_q}), 100 exact zeros"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_check() {
        let g = IntMatrix::from_rows(&[vec![2, -2], vec![-2, 2]]);
        assert!(is_psd_exact(&g));
        let g = IntMatrix::from_rows(&[vec![2, 1], vec![1, -2]]);
        assert!(!is_psd_exact(&g));
        let g = IntMatrix::from_rows(&[vec![0, 1], vec![1, 2]]);
        assert!(!is_psd_exact(&g));
    }

    #[test]
    fn corrupted_gram_fails_first_check() {
        let cfg = VerifyConfig {
            signatures: vec![WeightSignature::new(&[2, 2, 2, 2]).unwrap()],
            seed: 0,
            corrupt_gram: true,
        };
        let r = run_all(&cfg);
        assert_eq!(r.len(), 13);
        assert!(!r[0].pass);
        assert!(!all_pass(&r));
    }

    #[test]
    fn engineered_values() {
        let s = build_system(&WeightSignature::new(&[3, 3, 3]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = s.unit(0);
        let (z, lam) = radical_wall_charge(&s, &w, &mut rng);
        assert_eq!(z.eval(&w), z.zb(&s) * lam);
        assert!(z.is_normalized(&s));
    }
}
