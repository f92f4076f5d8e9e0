//! Central charges on the root lattice, the domains `E ⊂ H`, regularity,
//! and reduction into the fundamental domain `D`.
//!
//! `D` is the product of the open alcove (`im Z(α_v) > 0` on `Γ_a`) with a
//! half-open hypercube in dual real coordinates. The hypercube chart drops
//! the deepest vertex of the first arm and uses the remaining `Γ_a`
//! vertices `u_k` together with probes `β_k` satisfying `I(β_k, u_l) = δ_kl`;
//! the coordinates are `c_k = re Z(β_k)` and translations `φ(u_k)` shift
//! them by one.

use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::rational::{
    format_rational, parse_rational, rat, round_sig12, Rational, Real, DEFAULT_TOLERANCE,
};
use crate::root_lattice::{BasisLabel, LatticeVector, RootSystemData};
use crate::weyl_action::{self, GeneratorSymbol, LatticeIsometry, WeylWord};

/// Default cap on phase-one reflections.
pub const DEFAULT_ITERATION_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

/// A complex-valued functional, given by its values on the basis.
///
/// Zero tests in the float backend are absolute at `tol`; on normalized
/// charges `Z(a) = 1` fixes the scale, so this is a relative test.
#[derive(Clone, Debug, PartialEq)]
pub struct Charge<R: Real> {
    values: Vec<Complex<R>>,
    tol: f64,
}

pub type ExactCharge = Charge<Rational>;
pub type FloatCharge = Charge<f64>;

impl<R: Real> Charge<R> {
    pub fn new(values: Vec<Complex<R>>) -> Self {
        Charge {
            values,
            tol: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    fn check(&self, sys: &RootSystemData) -> Result<()> {
        if self.rank() != sys.rank() {
            return Err(Error::DimensionMismatch {
                expected: sys.rank(),
                got: self.rank(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &LatticeVector) -> Complex<R> {
        assert_eq!(x.len(), self.rank(), "charge/vector rank mismatch");
        let mut re = R::zero();
        let mut im = R::zero();
        for (c, z) in x.coords().iter().zip(&self.values) {
            if *c != 0 {
                let c = R::from_i64(*c);
                re = re + c.clone() * z.re.clone();
                im = im + c * z.im.clone();
            }
        }
        Complex::new(re, im)
    }

    pub fn eval_rational(&self, x: &[Rational]) -> Complex<R> {
        let mut re = R::zero();
        let mut im = R::zero();
        for (c, z) in x.iter().zip(&self.values) {
            if !c.is_zero() {
                let c = R::from_rational(c);
                re = re + c.clone() * z.re.clone();
                im = im + c * z.im.clone();
            }
        }
        Complex::new(re, im)
    }

    pub fn za(&self, sys: &RootSystemData) -> Complex<R> {
        self.eval(sys.a())
    }

    pub fn zb(&self, sys: &RootSystemData) -> Complex<R> {
        self.eval(sys.b())
    }

    fn is_zero_c(&self, z: &Complex<R>) -> bool {
        z.re.is_zero_tol(self.tol) && z.im.is_zero_tol(self.tol)
    }

    /// `τ = Z(b)/Z(a)`.
    pub fn tau(&self, sys: &RootSystemData) -> Result<Complex<R>> {
        self.check(sys)?;
        let za = self.za(sys);
        if self.is_zero_c(&za) {
            return Err(Error::DegenerateCharge("Z(a) = 0"));
        }
        Ok(self.zb(sys) / za)
    }

    pub fn is_normalized(&self, sys: &RootSystemData) -> bool {
        self.rank() == sys.rank() && self.is_zero_c(&(self.za(sys) - Complex::one()))
    }

    /// `Z / Z(a)`.
    pub fn normalize(&self, sys: &RootSystemData) -> Result<Self> {
        self.check(sys)?;
        let za = self.za(sys);
        if self.is_zero_c(&za) {
            return Err(Error::DegenerateCharge("Z(a) = 0"));
        }
        Ok(self.map_values(|z| z.clone() / za.clone()))
    }

    fn map_values(&self, f: impl Fn(&Complex<R>) -> Complex<R>) -> Self {
        Charge {
            values: self.values.iter().map(f).collect(),
            tol: self.tol,
        }
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        self.map_values(|z| z.clone() * c.clone())
    }

    /// `(gZ)(e_j) = Z(g⁻¹ e_j)`, given `g⁻¹`.
    pub fn act_by_inverse(&self, g_inv: &IntMatrix) -> Self {
        let n = self.rank();
        let values = (0..n)
            .map(|j| {
                let col = g_inv.column(j);
                self.eval(&LatticeVector(col))
            })
            .collect();
        Charge {
            values,
            tol: self.tol,
        }
    }

    /// `Z ↦ gZ` for an isometry matrix `g`.
    pub fn act(&self, sys: &RootSystemData, g: &IntMatrix) -> Result<Self> {
        self.check(sys)?;
        let iso = LatticeIsometry::new(sys, g.clone())?;
        Ok(self.act_by_inverse(iso.inverse().matrix()))
    }

    pub fn act_word(&self, sys: &RootSystemData, w: &WeylWord) -> Result<Self> {
        self.check(sys)?;
        Ok(self.act_by_inverse(&weyl_action::word_matrix(sys, &w.inverse())?))
    }

    /// `w_{α_v}·Z` for a basis vertex, in `O(rank)`.
    fn reflect_vertex(&self, sys: &RootSystemData, v: usize) -> Self {
        let zv = self.values[v].clone();
        let values = (0..self.rank())
            .map(|j| {
                let g = R::from_i64(*sys.gram().get(j, v));
                self.values[j].clone() - zv.clone() * Complex::new(g, R::zero())
            })
            .collect();
        Charge {
            values,
            tol: self.tol,
        }
    }

    /// `φ(u_v)^k·Z`, i.e. `Z(x) - k·I(x, α_v)·Z(a)`.
    fn translate_vertex(&self, sys: &RootSystemData, v: usize, k: i64) -> Self {
        let za = self.za(sys);
        let values = (0..self.rank())
            .map(|j| {
                let s = R::from_i64(k * *sys.gram().get(j, v));
                self.values[j].clone() - za.clone() * Complex::new(s, R::zero())
            })
            .collect();
        Charge {
            values,
            tol: self.tol,
        }
    }

    /// Multiplication by `(-i)^k`, i.e. `e^{-iπt}` at `t = k/2`.
    pub fn rotate_quarter(&self, k: i64) -> Self {
        let minus_i = Complex::new(R::zero(), -R::one());
        let mut c = Complex::new(R::one(), R::zero());
        for _ in 0..k.rem_euclid(4) {
            c = c * minus_i.clone();
        }
        self.scale(&c)
    }

    pub fn to_float(&self) -> FloatCharge {
        Charge {
            values: self
                .values
                .iter()
                .map(|z| Complex::new(z.re.to_f64(), z.im.to_f64()))
                .collect(),
            tol: self.tol,
        }
    }

    /// Largest coordinatewise distance to another charge.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| {
                let d = x.clone() - y.clone();
                d.re.to_f64().abs().max(d.im.to_f64().abs())
            })
            .fold(0.0, f64::max)
    }

    fn in_e(&self, sys: &RootSystemData) -> bool {
        self.is_normalized(sys) && self.zb(sys).im.is_pos(self.tol)
    }

    fn require_e(&self, sys: &RootSystemData) -> Result<()> {
        self.check(sys)?;
        if !self.in_e(sys) {
            return Err(Error::NotInE);
        }
        Ok(())
    }
}

/// Charge in either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum CentralCharge {
    Exact(ExactCharge),
    Float(FloatCharge),
}

impl From<ExactCharge> for CentralCharge {
    fn from(z: ExactCharge) -> Self {
        CentralCharge::Exact(z)
    }
}

impl From<FloatCharge> for CentralCharge {
    fn from(z: FloatCharge) -> Self {
        CentralCharge::Float(z)
    }
}

impl CentralCharge {
    pub fn backend(&self) -> Backend {
        match self {
            CentralCharge::Exact(_) => Backend::Exact,
            CentralCharge::Float(_) => Backend::Float,
        }
    }

    pub fn to_float(&self) -> FloatCharge {
        match self {
            CentralCharge::Exact(z) => z.to_float(),
            CentralCharge::Float(z) => z.clone(),
        }
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        match self {
            CentralCharge::Exact(z) => CentralCharge::Exact(z.with_tolerance(tol)),
            CentralCharge::Float(z) => CentralCharge::Float(z.with_tolerance(tol)),
        }
    }

    pub fn to_json(&self) -> ChargeJson {
        let values = match self {
            CentralCharge::Exact(z) => z
                .values()
                .iter()
                .map(|c| ComplexJson {
                    re: Value::String(format_rational(&c.re)),
                    im: Value::String(format_rational(&c.im)),
                })
                .collect(),
            CentralCharge::Float(z) => z
                .values()
                .iter()
                .map(|c| ComplexJson {
                    re: float_value(c.re),
                    im: float_value(c.im),
                })
                .collect(),
        };
        ChargeJson {
            backend: self.backend(),
            values,
        }
    }

    pub fn from_json(j: &ChargeJson) -> Result<Self> {
        match j.backend {
            Backend::Exact => {
                let values = j
                    .values
                    .iter()
                    .map(|c| Ok(Complex::new(value_rational(&c.re)?, value_rational(&c.im)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CentralCharge::Exact(Charge::new(values)))
            }
            Backend::Float => {
                let values = j
                    .values
                    .iter()
                    .map(|c| Ok(Complex::new(value_f64(&c.re)?, value_f64(&c.im)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(CentralCharge::Float(Charge::new(values)))
            }
        }
    }
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig12(x))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn value_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap() as i128)),
        _ => Err(Error::Parse(format!("exact charge value must be a \"p/q\" string, got {v}"))),
    }
}

fn value_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("invalid number {n}"))),
        Value::String(s) => Ok(Real::to_f64(&parse_rational(s)?)),
        _ => Err(Error::Parse(format!("invalid charge value {v}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: Value,
    pub im: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeJson {
    pub backend: Backend,
    pub values: Vec<ComplexJson>,
}

/// `Z ↦ e^{-iπt}·Z`. Stays exact when `t` is a real half-integer.
pub fn c_action(t: Complex<f64>, z: &CentralCharge) -> CentralCharge {
    let two_t = 2.0 * t.re;
    if t.im == 0.0 && two_t.fract() == 0.0 && two_t.abs() < 1e15 {
        let k = two_t as i64;
        return match z {
            CentralCharge::Exact(z) => CentralCharge::Exact(z.rotate_quarter(k)),
            CentralCharge::Float(z) => CentralCharge::Float(z.rotate_quarter(k)),
        };
    }
    let factor = (Complex::new(0.0, -PI) * t).exp();
    CentralCharge::Float(z.to_float().scale(&factor))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WallTag {
    /// `Z(α_v)` real positive.
    Wplus { vertex: BasisLabel },
    /// `Z(α_v)` real negative.
    Wminus { vertex: BasisLabel },
    /// Hypercube face `c_k = 1`.
    Yplus { vertex: BasisLabel },
    /// Hypercube face `c_k = 0`.
    Yminus { vertex: BasisLabel },
    /// `Z(α_v) = 0`.
    #[serde(rename = "Hboundary")]
    HBoundary { vertex: BasisLabel },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DomainFlags {
    pub normalized: bool,
    pub in_h: bool,
    pub in_e: bool,
    pub regular: bool,
    /// Open alcove: `im Z(α_v) > 0` on `Γ_a`.
    pub in_alcove: bool,
    /// Half-open hypercube `0 <= c_k < 1`.
    pub in_hypercube: bool,
    pub in_d: bool,
}

/// Dual coordinate system on the real parts of charges.
#[derive(Clone, Debug, PartialEq)]
pub struct HypercubeChart {
    omitted: BasisLabel,
    vertices: Vec<usize>,
    probes: Vec<Vec<Rational>>,
    cartan: IntMatrix,
}

impl HypercubeChart {
    pub fn new(sys: &RootSystemData) -> Self {
        let omitted = sys.extremal_vertex();
        let skip = sys.index_of(omitted).expect("extremal vertex");
        let vertices: Vec<usize> = (1..sys.rank()).filter(|&i| i != skip).collect();
        let k = vertices.len();
        let cartan = IntMatrix::from_fn(k, k, |i, j| *sys.gram().get(vertices[i], vertices[j]));
        let inv = linalg::inverse(&linalg::to_rational(&cartan)).expect("finite Cartan matrix");
        let probes = (0..k)
            .map(|i| {
                let mut p = vec![Rational::zero(); sys.rank()];
                for (j, &v) in vertices.iter().enumerate() {
                    p[v] = *inv.get(i, j);
                }
                p
            })
            .collect();
        HypercubeChart {
            omitted,
            vertices,
            probes,
            cartan,
        }
    }

    pub fn omitted(&self) -> BasisLabel {
        self.omitted
    }

    /// Basis indices of the chart vertices `u_k`.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn probes(&self) -> &[Vec<Rational>] {
        &self.probes
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    pub fn coords<R: Real>(&self, z: &Charge<R>) -> Vec<R> {
        self.probes.iter().map(|p| z.eval_rational(p).re).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult<R: Real> {
    pub word: WeylWord,
    pub reduced: Charge<R>,
    pub interior: bool,
    pub hit_walls: Vec<WallTag>,
    pub omitted_vertex: BasisLabel,
}

/// Shared per-system data for the domain computations.
fn chart(sys: &RootSystemData) -> HypercubeChart {
    HypercubeChart::new(sys)
}

/// True iff `Z` vanishes on no real or imaginary root.
///
/// For `α = α_f + m·b + n·a`, `Z(α) = Z(α_f) + m·τ + n`, so each finite
/// representative admits at most one candidate `(m, n)`.
pub fn is_regular<R: Real>(sys: &RootSystemData, z: &Charge<R>) -> Result<bool> {
    z.check(sys)?;
    if !z.is_normalized(sys) {
        return Err(Error::NotNormalized);
    }
    let tau = z.zb(sys);
    if !tau.im.is_pos(z.tol) {
        return Err(Error::NotInH);
    }
    let tol = z.tol;
    for f in sys.finite_roots() {
        let zf = z.eval(f);
        let m_real = -zf.im.clone() / tau.im.clone();
        let m = nearest_integer(&m_real);
        if !(zf.im.clone() + R::from_i64(m) * tau.im.clone()).is_zero_tol(tol) {
            continue;
        }
        let rest = zf.re.clone() + R::from_i64(m) * tau.re.clone();
        let n = nearest_integer(&(-rest.clone()));
        if (rest + R::from_i64(n)).is_zero_tol(tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn nearest_integer<R: Real>(x: &R) -> i64 {
    let half = R::from_rational(&rat(1, 2));
    (x.clone() + half).floor_i64()
}

/// `(index, Z(α_v))` over `Γ_a`.
fn alcove_values<R: Real>(sys: &RootSystemData, z: &Charge<R>) -> Vec<(usize, Complex<R>)> {
    (1..sys.rank()).map(|i| (i, z.values[i].clone())).collect()
}

pub fn domain_flags<R: Real>(sys: &RootSystemData, z: &Charge<R>) -> Result<DomainFlags> {
    z.check(sys)?;
    let normalized = z.is_normalized(sys);
    let tol = z.tol;
    let in_h = z
        .tau(sys)
        .map(|t| t.im.is_pos(tol))
        .unwrap_or(false);
    let in_e = normalized && in_h;
    let regular = in_e && is_regular(sys, z)?;
    let in_alcove = alcove_values(sys, z).into_iter().all(|(_, v)| v.im.is_pos(tol));
    let c = chart(sys).coords(z);
    let one = R::one();
    let in_hypercube = c
        .iter()
        .all(|x| !x.is_neg(tol) && (x.clone() - one.clone()).is_neg(tol));
    Ok(DomainFlags {
        normalized,
        in_h,
        in_e,
        regular,
        in_alcove,
        in_hypercube,
        in_d: in_e && in_alcove && in_hypercube,
    })
}

/// Moves `Z ∈ E` into the closure of `D`.
///
/// Phase one reflects at the most negative `im Z(α_v)` (ties: lowest
/// index) until the alcove inequalities hold. Phase two applies
/// `φ(u_k)^{⌊c_k⌋}`. The returned word `g` satisfies `g·Z = reduced`.
pub fn reduce_to_d<R: Real>(
    sys: &RootSystemData,
    z: &Charge<R>,
    cap: usize,
) -> Result<ReductionResult<R>> {
    z.require_e(sys)?;
    let tol = z.tol;
    let za = z.za(sys);
    let zb = z.zb(sys);
    let mut cur = z.clone();
    let mut reflections: Vec<GeneratorSymbol> = Vec::new();
    loop {
        let mut worst: Option<(usize, R)> = None;
        for (i, v) in alcove_values(sys, &cur) {
            if v.im.is_neg(tol) && worst.as_ref().is_none_or(|(_, w)| v.im < *w) {
                worst = Some((i, v.im));
            }
        }
        let Some((i, _)) = worst else { break };
        if reflections.len() >= cap {
            return Err(Error::IterationCap(cap));
        }
        cur = cur.reflect_vertex(sys, i);
        reflections.push(GeneratorSymbol::w(sys.label(i)));
    }
    let ch = chart(sys);
    let coords = ch.coords(&cur);
    let mut translations = Vec::new();
    for (k, c) in coords.iter().enumerate() {
        // a coordinate within tolerance below an integer counts as that integer
        let mut f = c.floor_i64();
        if !R::EXACT && (c.clone() - R::from_i64(f + 1)).is_zero_tol(tol) {
            f += 1;
        }
        if f == 0 {
            continue;
        }
        if (translations.len() as u128 + f.unsigned_abs() as u128) > cap as u128 {
            return Err(Error::IterationCap(cap));
        }
        let v = ch.vertices[k];
        cur = cur.translate_vertex(sys, v, f);
        let sym = if f > 0 {
            GeneratorSymbol::r(sys.label(v))
        } else {
            GeneratorSymbol::r_inv(sys.label(v))
        };
        translations.extend(std::iter::repeat_n(sym, f.unsigned_abs() as usize));
    }
    debug_assert!(cur.is_zero_c(&(cur.za(sys) - za)));
    debug_assert!(cur.is_zero_c(&(cur.zb(sys) - zb)));
    let hit_walls = walls_of(sys, &cur, &ch);
    let word = WeylWord(
        translations
            .into_iter()
            .chain(reflections.into_iter().rev())
            .collect(),
    );
    Ok(ReductionResult {
        word,
        interior: hit_walls.is_empty(),
        reduced: cur,
        hit_walls,
        omitted_vertex: ch.omitted,
    })
}

fn walls_of<R: Real>(sys: &RootSystemData, z: &Charge<R>, ch: &HypercubeChart) -> Vec<WallTag> {
    let tol = z.tol;
    let mut out = Vec::new();
    for (i, v) in alcove_values(sys, z) {
        if v.im.is_zero_tol(tol) {
            let vertex = sys.label(i);
            out.push(match v.re.sign(tol) {
                std::cmp::Ordering::Greater => WallTag::Wplus { vertex },
                std::cmp::Ordering::Less => WallTag::Wminus { vertex },
                std::cmp::Ordering::Equal => WallTag::HBoundary { vertex },
            });
        }
    }
    for (k, c) in ch.coords(z).iter().enumerate() {
        let vertex = sys.label(ch.vertices[k]);
        if c.is_zero_tol(tol) {
            out.push(WallTag::Yminus { vertex });
        } else if (c.clone() - R::one()).is_zero_tol(tol) {
            out.push(WallTag::Yplus { vertex });
        }
    }
    out
}

/// Walls of the closure of `D` on which `Z` lies; empty in the interior.
pub fn boundary_walls<R: Real>(sys: &RootSystemData, z: &Charge<R>) -> Result<Vec<WallTag>> {
    z.check(sys)?;
    if !z.in_e(sys) {
        return Err(Error::NotInClosureD);
    }
    let tol = z.tol;
    let ch = chart(sys);
    let alcove_ok = alcove_values(sys, z).into_iter().all(|(_, v)| !v.im.is_neg(tol));
    let cube_ok = ch
        .coords(z)
        .iter()
        .all(|c| !c.is_neg(tol) && !(c.clone() - R::one()).is_pos(tol));
    if !alcove_ok || !cube_ok {
        return Err(Error::NotInClosureD);
    }
    Ok(walls_of(sys, z, &ch))
}

/// `(gZ)(u) = Z(g⁻¹u)` for an isometry.
pub fn act_charge<R: Real>(sys: &RootSystemData, g: &IntMatrix, z: &Charge<R>) -> Result<Charge<R>> {
    z.act(sys, g)
}

/// Charge built from values on `Γ_a`; `Z(α_{-1}) = Z(α_0) - 1` makes it normalized.
pub fn charge_from_affine_values<R: Real>(affine: Vec<Complex<R>>) -> Charge<R> {
    let zm1 = affine[0].clone() - Complex::one();
    let mut values = vec![zm1];
    values.extend(affine);
    Charge::new(values)
}

fn random_rational<G: Rng>(rng: &mut G, lo: i64, hi: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    rat(rng.gen_range(lo * d..=hi * d), d)
}

/// Random exact charge in the interior of `D`.
pub fn sample_interior_charge<G: Rng>(sys: &RootSystemData, rng: &mut G) -> ExactCharge {
    let ch = chart(sys);
    let n = sys.rank();
    let mut im = vec![Rational::zero(); n];
    for v in im.iter_mut().skip(1) {
        let d = rng.gen_range(1..=6);
        *v = rat(rng.gen_range(1..=4 * d), d);
    }
    let c: Vec<Rational> = (0..ch.vertices.len())
        .map(|_| {
            let d = rng.gen_range(2..=9);
            rat(rng.gen_range(1..d), d)
        })
        .collect();
    let re_tau = random_rational(rng, -3, 3, 4);
    let mut re = vec![Rational::zero(); n];
    for (k, &v) in ch.vertices.iter().enumerate() {
        re[v] = (0..c.len())
            .map(|j| Rational::from_integer(*ch.cartan.get(k, j) as i128) * c[j])
            .fold(Rational::zero(), |s, x| s + x);
    }
    let skip = sys.index_of(ch.omitted).expect("omitted vertex");
    let marks = sys.marks();
    let rest = (1..n)
        .filter(|&i| i != skip)
        .map(|i| Rational::from_integer(marks[i] as i128) * re[i])
        .fold(Rational::zero(), |s, x| s + x);
    re[skip] = (re_tau - rest) / Rational::from_integer(marks[skip] as i128);
    let affine = (1..n).map(|i| Complex::new(re[i], im[i])).collect();
    charge_from_affine_values(affine)
}

/// Random exact charge in `E` (not necessarily regular or in `D`).
pub fn sample_e_charge<G: Rng>(sys: &RootSystemData, rng: &mut G) -> ExactCharge {
    loop {
        let affine: Vec<Complex<Rational>> = (1..sys.rank())
            .map(|_| Complex::new(random_rational(rng, -3, 3, 5), random_rational(rng, -2, 3, 5)))
            .collect();
        let z = charge_from_affine_values(affine);
        if z.zb(sys).im >= Rational::one() {
            return z;
        }
    }
}

/// Random word of the given length in reflections and translations.
pub fn sample_word<G: Rng>(sys: &RootSystemData, rng: &mut G, len: usize) -> WeylWord {
    let labels = sys.labels();
    WeylWord(
        (0..len)
            .map(|_| {
                let v = labels[rng.gen_range(0..labels.len())];
                match (v, rng.gen_range(0..3)) {
                    (BasisLabel::VMinus1, _) | (_, 0) => GeneratorSymbol::w(v),
                    (_, 1) => GeneratorSymbol::r(v),
                    _ => GeneratorSymbol::r_inv(v),
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{cx, rint};
    use crate::root_lattice::{build_system, WeightSignature};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e6() -> RootSystemData {
        build_system(&WeightSignature::new(&[3, 3, 3]).unwrap()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    /// Slope charge of the (3,3,3) system: `-deg + i·rk`.
    fn z0() -> ExactCharge {
        let t = cx(q(-1, 3), rint(0));
        Charge::new(vec![cx(rint(-1), rint(1)), cx(rint(0), rint(1)), t, t, t, t, t, t])
    }

    #[test]
    fn normalization() {
        let s = e6();
        let z = z0();
        assert_eq!(z.za(&s), cx(rint(1), rint(0)));
        assert_eq!(z.normalize(&s).unwrap(), z);
        let scaled = z.scale(&cx(rint(0), rint(2)));
        assert_eq!(scaled.normalize(&s).unwrap(), z);
        let degenerate = Charge::new(vec![cx(rint(1), rint(1)); 8]);
        assert_eq!(degenerate.normalize(&s), Err(Error::DegenerateCharge("Z(a) = 0")));
    }

    #[test]
    fn regularity_examples() {
        let s = e6();
        assert!(is_regular(&s, &z0()).unwrap());
        let mut vals = z0().values().to_vec();
        vals[2] = cx(rint(0), rint(0));
        let zero_on_root = Charge::new(vals);
        assert!(!is_regular(&s, &zero_on_root).unwrap());
        // Z(α_0) = i, τ = 2i, Z(α_{(1,1)}) = 3 - 2i
        let mut affine = vec![cx(rint(0), rint(1))];
        affine.extend(vec![cx(rint(0), q(1, 3)); 6]);
        affine[1] = cx(rint(3), rint(-2));
        // choose Z(α_{(1,2)}) so that τ = 2i
        affine[2] = cx(rint(0), rint(0));
        let partial = charge_from_affine_values(affine.clone()).zb(&s);
        affine[2] = cx(rint(0), rint(2)) - partial;
        let z = charge_from_affine_values(affine);
        assert_eq!(z.zb(&s), cx(rint(0), rint(2)));
        let alpha = s.recompose(&s.unit(2), 1, -3);
        assert_eq!(s.norm(&alpha), 2);
        assert_eq!(z.eval(&alpha), cx(rint(0), rint(0)));
        assert!(!is_regular(&s, &z).unwrap());
        assert_eq!(is_regular(&s, &z.scale(&cx(rint(2), rint(0)))), Err(Error::NotNormalized));
    }

    #[test]
    fn actions() {
        let s = e6();
        let z = z0();
        let id = IntMatrix::identity(8);
        assert_eq!(act_charge(&s, &id, &z).unwrap(), z);
        let w0 = weyl_action::simple_reflection(&s, BasisLabel::V0).unwrap();
        let wz = act_charge(&s, &w0, &z).unwrap();
        assert_eq!(wz.eval(&s.unit(1)), -z.eval(&s.unit(1)));
        let r0 = weyl_action::r_element(&s, BasisLabel::V0).unwrap();
        let rz = act_charge(&s, r0.matrix(), &z).unwrap();
        assert_eq!(rz.eval(&s.unit(2)), z.eval(&s.unit(2)) + Complex::one());
        assert_eq!(rz.za(&s), z.za(&s));
        assert_eq!(rz.zb(&s), z.zb(&s));
        let mut bad = IntMatrix::identity(8);
        bad.set(2, 2, -2);
        assert_eq!(act_charge(&s, &bad, &z), Err(Error::NotIsometry));
        // contravariant composition
        let w = WeylWord(vec![GeneratorSymbol::w(BasisLabel::V0), GeneratorSymbol::r(BasisLabel::arm(1, 1))]);
        let step = z
            .act_word(&s, &WeylWord(vec![w.0[1]]))
            .unwrap()
            .act_word(&s, &WeylWord(vec![w.0[0]]))
            .unwrap();
        assert_eq!(z.act_word(&s, &w).unwrap(), step);
    }

    #[test]
    fn rotations() {
        let z = CentralCharge::Exact(z0());
        assert_eq!(c_action(Complex::new(0.0, 0.0), &z), z);
        assert_eq!(c_action(Complex::new(2.0, 0.0), &z), z);
        match c_action(Complex::new(1.0, 0.0), &z) {
            CentralCharge::Exact(m) => assert_eq!(m, z0().scale(&cx(rint(-1), rint(0)))),
            _ => panic!("expected exact"),
        }
        let f = c_action(Complex::new(0.25, 0.0), &z);
        assert_eq!(f.backend(), Backend::Float);
    }

    #[test]
    fn interior_samples_are_interior() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let z = sample_interior_charge(&s, &mut rng);
            let flags = domain_flags(&s, &z).unwrap();
            assert!(flags.in_d, "{flags:?}");
            assert_eq!(boundary_walls(&s, &z).unwrap(), vec![]);
            let r = reduce_to_d(&s, &z, DEFAULT_ITERATION_CAP).unwrap();
            assert!(r.word.is_empty());
            assert!(r.interior);
            assert_eq!(r.reduced, z);
        }
    }

    #[test]
    fn reflected_charge_reduces_back() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z = sample_interior_charge(&s, &mut rng);
        let w = WeylWord(vec![GeneratorSymbol::w(BasisLabel::V0)]);
        let wz = z.act_word(&s, &w).unwrap();
        let r = reduce_to_d(&s, &wz, DEFAULT_ITERATION_CAP).unwrap();
        assert_eq!(r.word, w);
        assert_eq!(r.reduced, z);
        let t = WeylWord(vec![GeneratorSymbol::r(BasisLabel::arm(1, 1))]);
        let tz = z.act_word(&s, &t).unwrap();
        let r = reduce_to_d(&s, &tz, DEFAULT_ITERATION_CAP).unwrap();
        assert_eq!(r.reduced, z);
        assert_eq!(tz.act_word(&s, &r.word).unwrap(), z);
    }

    #[test]
    fn round_trips_all_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for sig in WeightSignature::elliptic_signatures() {
            let s = build_system(&sig).unwrap();
            for _ in 0..40 {
                let z = sample_interior_charge(&s, &mut rng);
                let len = rng.gen_range(0..=10);
                let w = sample_word(&s, &mut rng, len);
                let wz = z.act_word(&s, &w).unwrap();
                let r = reduce_to_d(&s, &wz, DEFAULT_ITERATION_CAP).unwrap();
                assert_eq!(r.reduced, z, "{sig}");
                assert_eq!(wz.act_word(&s, &r.word).unwrap(), z);
                let m = weyl_action::word_matrix(&s, &r.word).unwrap();
                let w_inv = weyl_action::word_matrix(&s, &w.inverse()).unwrap();
                assert_eq!(m, w_inv);
                // float backend agrees within tolerance
                let rf = reduce_to_d(&s, &wz.to_float(), DEFAULT_ITERATION_CAP).unwrap();
                assert!(rf.reduced.max_abs_diff(&z.to_float()) < 1e-9);
            }
        }
    }

    #[test]
    fn walls_on_faces() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = sample_interior_charge(&s, &mut rng);
        // Z(α_0) on the positive real axis
        let mut vals = z.values().to_vec();
        vals[1] = cx(q(1, 2), rint(0));
        vals[0] = cx(q(-1, 2), rint(0));
        let zw = Charge::new(vals);
        let walls = walls_of(&s, &zw, &chart(&s));
        assert!(walls.contains(&WallTag::Wplus { vertex: BasisLabel::V0 }));
        // hypercube face: set c_0 = 0 by translating by its floor and subtracting the fraction
        let ch = chart(&s);
        let c = ch.coords(&z);
        let v = ch.vertices()[0];
        let mut vals = z.values().to_vec();
        // shifting re Z along u_0 by -c_0 Cartan column keeps the other c_k
        for (j, &u) in ch.vertices().iter().enumerate() {
            vals[u].re -= c[0] * Rational::from_integer(*ch.cartan().get(j, 0) as i128);
        }
        let skip = s.index_of(ch.omitted()).unwrap();
        let marks = s.marks();
        let tau_re = z.zb(&s).re;
        let rest = (1..s.rank()).filter(|&i| i != skip).map(|i| Rational::from_integer(marks[i] as i128) * vals[i].re).fold(Rational::zero(), |a, b| a + b);
        vals[skip].re = tau_re - rest;
        vals[0] = vals[1] - Complex::one();
        let zy = Charge::new(vals);
        assert_eq!(ch.coords(&zy)[0], Rational::zero());
        assert_eq!(
            boundary_walls(&s, &zy).unwrap(),
            vec![WallTag::Yminus { vertex: s.label(v) }]
        );
        let r = reduce_to_d(&s, &zy, 10).unwrap();
        assert!(!r.interior);
    }

    #[test]
    fn regularity_is_invariant() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let z = sample_e_charge(&s, &mut rng);
            let w = sample_word(&s, &mut rng, 6);
            let wz = z.act_word(&s, &w).unwrap();
            assert_eq!(is_regular(&s, &z).unwrap(), is_regular(&s, &wz).unwrap());
        }
    }

    #[test]
    fn d_positivity_shadow() {
        let s = e6();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = sample_interior_charge(&s, &mut rng);
        for i in 1..s.rank() {
            assert!(z.eval(&s.unit(i)).im > Rational::zero());
        }
        // cluster class -a has charge -1
        assert_eq!(z.eval(&-s.a()), cx(rint(-1), rint(0)));
    }

    #[test]
    fn json_round_trip() {
        let z = CentralCharge::Exact(z0());
        let j = serde_json::to_string(&z.to_json()).unwrap();
        assert!(j.starts_with(r#"{"backend":"exact","values":[{"re":"-1/1","im":"1/1"}"#));
        let back: ChargeJson = serde_json::from_str(&j).unwrap();
        assert_eq!(CentralCharge::from_json(&back).unwrap(), z);
        let f = CentralCharge::Float(z0().to_float());
        let back: ChargeJson = serde_json::from_str(&serde_json::to_string(&f.to_json()).unwrap()).unwrap();
        assert!(CentralCharge::from_json(&back).unwrap().to_float().max_abs_diff(&f.to_float()) < 1e-11);
    }

    #[test]
    fn non_e_inputs_rejected() {
        let s = e6();
        let z = z0().scale(&cx(rint(-1), rint(0))).normalize(&s).unwrap();
        assert_eq!(z, z0());
        let mut vals = z0().values().to_vec();
        for v in vals.iter_mut() {
            v.im = -v.im;
        }
        let bad = Charge::new(vals);
        assert_eq!(reduce_to_d(&s, &bad, 10).unwrap_err(), Error::NotInE);
    }
}
