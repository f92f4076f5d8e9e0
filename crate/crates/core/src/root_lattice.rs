//! Marked elliptic root systems built from a weight signature.
//!
//! The lattice has basis `v_{-1}, v_0` followed by arm vertices `arm(i, j)`,
//! arms in input order and each arm inner-to-outer. The affine subdiagram
//! `Γ_a` is everything except `v_{-1}`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, Matrix};
use crate::rational::{format_rational, Rational};

/// Default limit on [`RootSystemData::enumerate_roots`] output size.
pub const DEFAULT_ROOT_CAP: u128 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSignature(Vec<u32>);

impl WeightSignature {
    pub fn new(weights: &[i64]) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| w < 2) {
            return Err(Error::InvalidWeight(w));
        }
        Ok(WeightSignature(weights.iter().map(|&w| w as u32).collect()))
    }

    pub fn weights(&self) -> &[u32] {
        &self.0
    }

    /// `Σ (1 - 1/r_i)`, exactly.
    pub fn orbifold_sum(&self) -> Rational {
        self.0
            .iter()
            .map(|&r| Rational::one() - Rational::new(1, r as i128))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_elliptic(&self) -> bool {
        self.orbifold_sum() == Rational::from_integer(2)
    }

    /// The four elliptic signatures, in the order used throughout the crate.
    pub fn elliptic_signatures() -> Vec<WeightSignature> {
        [vec![3, 3, 3], vec![4, 4, 2], vec![6, 3, 2], vec![2, 2, 2, 2]]
            .into_iter()
            .map(WeightSignature)
            .collect()
    }
}

impl fmt::Display for WeightSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisLabel {
    VMinus1,
    V0,
    /// `arm` and `depth` are 1-based; depth 1 is adjacent to the centers.
    Arm { arm: usize, depth: usize },
}

impl BasisLabel {
    pub fn arm(arm: usize, depth: usize) -> Self {
        BasisLabel::Arm { arm, depth }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisLabel::VMinus1 => write!(f, "vMinus1"),
            BasisLabel::V0 => write!(f, "v0"),
            BasisLabel::Arm { arm, depth } => write!(f, "arm({arm},{depth})"),
        }
    }
}

impl FromStr for BasisLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "vMinus1" | "v-1" => return Ok(BasisLabel::VMinus1),
            "v0" => return Ok(BasisLabel::V0),
            _ => {}
        }
        let inner = s
            .strip_prefix("arm(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("invalid basis label {s:?}")))?;
        let (i, j) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("invalid basis label {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("invalid basis label {s:?}")))
        };
        Ok(BasisLabel::Arm {
            arm: parse(i)?,
            depth: parse(j)?,
        })
    }
}

impl Serialize for BasisLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BasisLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer coordinates over the labeled basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn content(&self) -> i64 {
        linalg::gcd_all(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.0.iter().map(|&x| Rational::from_integer(x as i128)).collect()
    }
}

impl Index<usize> for LatticeVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, o: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, o: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl Mul<&LatticeVector> for i64 {
    type Output = LatticeVector;
    fn mul(self, v: &LatticeVector) -> LatticeVector {
        LatticeVector(v.0.iter().map(|a| self * a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootClass {
    /// `x = finite_part + m·b + n·a` with `finite_part` canonical.
    RealRoot {
        finite_part: LatticeVector,
        m: i64,
        n: i64,
    },
    /// `x = m·b + n·a`, `(m, n) != (0, 0)`.
    ImaginaryRoot { m: i64, n: i64 },
    NotRoot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Arm {
    start: usize,
    weight: u32,
}

impl Arm {
    fn len(&self) -> usize {
        self.weight as usize - 1
    }
}

#[derive(Clone, Debug)]
pub struct RootSystemData {
    signature: WeightSignature,
    labels: Vec<BasisLabel>,
    arms: Vec<Arm>,
    gram: IntMatrix,
    a: LatticeVector,
    b: LatticeVector,
    finite_roots: OnceLock<Vec<LatticeVector>>,
}

impl PartialEq for RootSystemData {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature && self.gram == other.gram
    }
}

fn diagram(sig: &WeightSignature) -> (Vec<BasisLabel>, Vec<Arm>, IntMatrix) {
    let mut labels = vec![BasisLabel::VMinus1, BasisLabel::V0];
    let mut arms = Vec::new();
    for (i, &r) in sig.weights().iter().enumerate() {
        arms.push(Arm {
            start: labels.len(),
            weight: r,
        });
        for j in 1..r as usize {
            labels.push(BasisLabel::arm(i + 1, j));
        }
    }
    let n = labels.len();
    let mut gram = IntMatrix::identity(n).map(|x| 2 * x);
    let mut edge = |i: usize, j: usize, v: i64| {
        gram.set(i, j, v);
        gram.set(j, i, v);
    };
    edge(0, 1, 2);
    for arm in &arms {
        edge(0, arm.start, -1);
        edge(1, arm.start, -1);
        for k in 1..arm.len() {
            edge(arm.start + k - 1, arm.start + k, -1);
        }
    }
    (labels, arms, gram)
}

/// Builds the marked elliptic root system of an elliptic weight signature.
pub fn build_system(sig: &WeightSignature) -> Result<RootSystemData> {
    let (labels, arms, gram) = diagram(sig);
    let n = labels.len();
    if !sig.is_elliptic() {
        let sum = sig.orbifold_sum();
        let radical_rank = n - linalg::int_rank(&gram);
        let classification = if sum < Rational::from_integer(2) {
            "finite"
        } else {
            "hyperbolic"
        };
        return Err(Error::NonEllipticSignature {
            weights: sig.weights().to_vec(),
            sum: format_rational(&sum),
            radical_rank,
            classification,
        });
    }

    let mut a = vec![0; n];
    a[0] = -1;
    a[1] = 1;

    // b spans the kernel of the affine Cartan matrix on Γ_a.
    let affine = Matrix::from_fn(n - 1, n - 1, |i, j| *gram.get(i + 1, j + 1));
    let ker = linalg::kernel(&linalg::to_rational(&affine));
    assert_eq!(ker.len(), 1, "affine subdiagram must have a one-dimensional kernel");
    let mut null_root = linalg::primitive_integer(&ker[0]);
    if null_root[0] < 0 {
        null_root.iter_mut().for_each(|x| *x = -*x);
    }
    let mut b = vec![0];
    b.extend(null_root);

    let sys = RootSystemData {
        signature: sig.clone(),
        labels,
        arms,
        gram,
        a: LatticeVector(a),
        b: LatticeVector(b),
        finite_roots: OnceLock::new(),
    };
    debug_assert!(sys.b.0[1..].iter().all(|&m| m > 0));
    debug_assert!(sys.is_radical(&sys.a) && sys.is_radical(&sys.b));
    Ok(sys)
}

impl RootSystemData {
    pub fn signature(&self) -> &WeightSignature {
        &self.signature
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    /// Labels of `Γ_a`: every vertex except `v_{-1}`.
    pub fn affine_labels(&self) -> &[BasisLabel] {
        &self.labels[1..]
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn label(&self, i: usize) -> BasisLabel {
        self.labels[i]
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn a(&self) -> &LatticeVector {
        &self.a
    }

    pub fn b(&self) -> &LatticeVector {
        &self.b
    }

    /// Coefficients of `b` per label (0 on `v_{-1}`).
    pub fn marks(&self) -> &[i64] {
        &self.b.0
    }

    /// The `v_0`-mark of `b`, equal to the covering degree.
    pub fn m0(&self) -> i64 {
        self.b.0[1]
    }

    pub fn basis_vector(&self, label: BasisLabel) -> Result<LatticeVector> {
        let i = self.index_of(label).ok_or(Error::InvalidVertex(label))?;
        Ok(LatticeVector::unit(self.rank(), i))
    }

    pub fn unit(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank(), i)
    }

    /// Deepest vertex of the first arm; it has mark 1.
    pub fn extremal_vertex(&self) -> BasisLabel {
        let arm = &self.arms[0];
        self.labels[arm.start + arm.len() - 1]
    }

    pub fn check_dim(&self, x: &LatticeVector) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn pairing(&self, x: &LatticeVector, y: &LatticeVector) -> Result<i64> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.pair(x, y))
    }

    /// Unchecked `xᵀ G y`.
    pub(crate) fn pair(&self, x: &LatticeVector, y: &LatticeVector) -> i64 {
        self.gram.bilinear(&x.0, &y.0)
    }

    pub(crate) fn gram_times(&self, x: &LatticeVector) -> Vec<i64> {
        self.gram.mul_vec(&x.0)
    }

    pub fn norm(&self, x: &LatticeVector) -> i64 {
        self.pair(x, x)
    }

    /// `I(x, ·) ≡ 0`.
    pub fn is_radical(&self, x: &LatticeVector) -> bool {
        self.gram_times(x).iter().all(|&v| v == 0)
    }

    /// Splits `x = finite_part + m·b + n·a` with the canonical finite part:
    /// zero `v_{-1}` coordinate, `v_0` coordinate in `[0, m0)`.
    pub fn decompose(&self, x: &LatticeVector) -> (LatticeVector, i64, i64) {
        let n = -x[0];
        let y = x - &(n * &self.a);
        let m = Integer::div_floor(&y[1], &self.m0());
        let f = &y - &(m * &self.b);
        (f, m, n)
    }

    pub fn recompose(&self, finite_part: &LatticeVector, m: i64, n: i64) -> LatticeVector {
        &(finite_part + &(m * &self.b)) + &(n * &self.a)
    }

    pub fn classify_vector(&self, x: &LatticeVector) -> Result<RootClass> {
        self.check_dim(x)?;
        if x.is_zero() {
            return Ok(RootClass::NotRoot);
        }
        match self.norm(x) {
            2 => {
                let (finite_part, m, n) = self.decompose(x);
                Ok(RootClass::RealRoot { finite_part, m, n })
            }
            0 if self.is_radical(x) => {
                let (f, m, n) = self.decompose(x);
                debug_assert!(f.is_zero(), "radical lattice is spanned by a and b");
                if !f.is_zero() {
                    return Ok(RootClass::NotRoot);
                }
                Ok(RootClass::ImaginaryRoot { m, n })
            }
            _ => Ok(RootClass::NotRoot),
        }
    }

    /// Canonical representatives of the finite roots, sorted.
    pub fn finite_roots(&self) -> &[LatticeVector] {
        self.finite_roots.get_or_init(|| self.enumerate_finite_roots())
    }

    pub fn finite_root_count(&self) -> usize {
        self.finite_roots().len()
    }

    /// Real roots `α_f + m·b + n·a` with `|m| <= m_bound`, `|n| <= n_bound`.
    pub fn enumerate_roots(&self, m_bound: i64, n_bound: i64) -> Result<Vec<LatticeVector>> {
        self.enumerate_roots_capped(m_bound, n_bound, DEFAULT_ROOT_CAP)
    }

    pub fn enumerate_roots_capped(
        &self,
        m_bound: i64,
        n_bound: i64,
        cap: u128,
    ) -> Result<Vec<LatticeVector>> {
        let (m_bound, n_bound) = (m_bound.max(0), n_bound.max(0));
        let count = self.finite_root_count() as u128
            * (2 * m_bound as u128 + 1)
            * (2 * n_bound as u128 + 1);
        if count > cap {
            return Err(Error::ResourceCap {
                requested: count,
                limit: cap,
            });
        }
        let mut out = Vec::with_capacity(count as usize);
        for f in self.finite_roots() {
            for m in -m_bound..=m_bound {
                for n in -n_bound..=n_bound {
                    out.push(self.recompose(f, m, n));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Bounded enumeration of norm-2 canonical representatives.
    ///
    /// With the `v_0` coordinate fixed to `c`, the arms decouple; each arm
    /// contributes a positive definite quadratic whose integer points lie in
    /// a box of radius `r_i` around its real minimizer `c·(r_i - k)/r_i`.
    fn enumerate_finite_roots(&self) -> Vec<LatticeVector> {
        let n = self.rank();
        let g = &self.gram;
        let mut roots = Vec::new();
        for c in 0..self.m0() {
            let target = 2 - g.get(1, 1) * c * c;
            let per_arm: Vec<Vec<(i64, Vec<i64>)>> = self
                .arms
                .iter()
                .map(|arm| self.arm_points(arm, c))
                .collect();
            let mins: Vec<i64> = per_arm
                .iter()
                .map(|pts| pts.iter().map(|p| p.0).min().unwrap_or(0))
                .collect();
            let total_min: i64 = mins.iter().sum();
            // Keep only arm points that can still reach the target.
            let pruned: Vec<Vec<(i64, Vec<i64>)>> = per_arm
                .into_iter()
                .zip(&mins)
                .map(|(pts, &mi)| {
                    let slack = target - (total_min - mi);
                    pts.into_iter().filter(|p| p.0 <= slack).collect()
                })
                .collect();
            let mut base = vec![0i64; n];
            base[1] = c;
            self.combine_arms(&pruned, 0, target, &mut base, &mut roots);
        }
        roots.sort();
        roots
    }

    fn arm_points(&self, arm: &Arm, c: i64) -> Vec<(i64, Vec<i64>)> {
        let g = &self.gram;
        let len = arm.len();
        let r = arm.weight as i64;
        let lo: Vec<i64> = (1..=len as i64)
            .map(|k| Integer::div_floor(&(c * (r - k)), &r) - r)
            .collect();
        let hi: Vec<i64> = (1..=len as i64)
            .map(|k| Integer::div_ceil(&(c * (r - k)), &r) + r)
            .collect();
        let mut y = lo.clone();
        let mut out = Vec::new();
        loop {
            let mut q = 0;
            for k in 0..len {
                let ik = arm.start + k;
                q += 2 * c * g.get(1, ik) * y[k];
                for l in 0..len {
                    q += g.get(ik, arm.start + l) * y[k] * y[l];
                }
            }
            out.push((q, y.clone()));
            // odometer increment
            let mut k = 0;
            loop {
                if k == len {
                    return out;
                }
                if y[k] < hi[k] {
                    y[k] += 1;
                    break;
                }
                y[k] = lo[k];
                k += 1;
            }
        }
    }

    fn combine_arms(
        &self,
        arms: &[Vec<(i64, Vec<i64>)>],
        i: usize,
        remaining: i64,
        base: &mut Vec<i64>,
        out: &mut Vec<LatticeVector>,
    ) {
        if i == arms.len() {
            if remaining == 0 {
                out.push(LatticeVector(base.clone()));
            }
            return;
        }
        let start = self.arms[i].start;
        for (q, y) in &arms[i] {
            base[start..start + y.len()].copy_from_slice(y);
            self.combine_arms(arms, i + 1, remaining - q, base, out);
        }
        let len = self.arms[i].len();
        base[start..start + len].iter_mut().for_each(|x| *x = 0);
    }

    /// Exact rank of the radical of the Gram form.
    pub fn radical_rank(&self) -> usize {
        self.rank() - linalg::int_rank(&self.gram)
    }

    /// Smallest eigenvalue of the Gram matrix (float check).
    pub fn gram_min_eigenvalue(&self) -> f64 {
        let n = self.rank();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| *self.gram.get(i, j) as f64);
        m.symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Both elementary divisors of the 2 x rank matrix `[a; b]` equal 1.
    pub fn radical_frame_saturated(&self) -> bool {
        self.a.content() == 1 && linalg::minor_gcd_2(&self.a.0, &self.b.0) == 1
    }

    /// Connectivity of the Dynkin graph (nonzero off-diagonal Gram entries).
    pub fn is_connected(&self) -> bool {
        let n = self.rank();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (j, s) in seen.iter_mut().enumerate() {
                if !*s && *self.gram.get(i, j) != 0 {
                    *s = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            weights: self.signature.weights().to_vec(),
            basis: self.labels.clone(),
            gram: self.gram.to_rows(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    /// Rebuilds from JSON, rejecting data that disagrees with the diagram rules.
    pub fn from_json(j: &RootSystemJson) -> Result<Self> {
        let weights: Vec<i64> = j.weights.iter().map(|&w| w as i64).collect();
        let sys = build_system(&WeightSignature::new(&weights)?)?;
        if sys.to_json() != *j {
            return Err(Error::Parse(
                "root system JSON does not match its weight signature".into(),
            ));
        }
        Ok(sys)
    }

    /// Test hook: breaks the `v_{-1}`/`v_0` double edge.
    #[doc(hidden)]
    pub fn with_corrupted_gram(mut self) -> Self {
        self.gram.set(0, 1, 1);
        self.gram.set(1, 0, 1);
        self.finite_roots = OnceLock::new();
        self
    }

    /// Counts of real and imaginary classes per self-pairing, for diagnostics.
    pub fn norm_histogram(&self, vs: &[LatticeVector]) -> BTreeMap<i64, usize> {
        let mut h = BTreeMap::new();
        for v in vs {
            *h.entry(self.norm(v)).or_insert(0) += 1;
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemJson {
    pub weights: Vec<u32>,
    pub basis: Vec<BasisLabel>,
    pub gram: Vec<Vec<i64>>,
    pub a: LatticeVector,
    pub b: LatticeVector,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(w: &[i64]) -> RootSystemData {
        build_system(&WeightSignature::new(w).unwrap()).unwrap()
    }

    #[test]
    fn e6_gram_and_null_root() {
        let s = sys(&[3, 3, 3]);
        assert_eq!(s.rank(), 8);
        assert_eq!(s.gram().row(0), &[2, 2, -1, 0, -1, 0, -1, 0]);
        assert_eq!(s.b().0, vec![0, 3, 2, 1, 2, 1, 2, 1]);
        assert_eq!(s.a().0, vec![-1, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(s.m0(), 3);
    }

    #[test]
    fn null_roots_of_other_systems() {
        assert_eq!(sys(&[4, 4, 2]).b().0, vec![0, 4, 3, 2, 1, 3, 2, 1, 2]);
        assert_eq!(
            sys(&[6, 3, 2]).b().0,
            vec![0, 6, 5, 4, 3, 2, 1, 4, 2, 3]
        );
        assert_eq!(sys(&[2, 2, 2, 2]).b().0, vec![0, 2, 1, 1, 1, 1]);
        assert_eq!(sys(&[2, 2, 2, 2]).rank(), 6);
    }

    #[test]
    fn non_elliptic_reports_radical_rank() {
        let err = build_system(&WeightSignature::new(&[2, 3, 7]).unwrap()).unwrap_err();
        match err {
            Error::NonEllipticSignature {
                radical_rank,
                classification,
                ref sum,
                ..
            } => {
                assert_eq!(sum, "85/42");
                assert_eq!(classification, "hyperbolic");
                assert_eq!(radical_rank, 1);
            }
            e => panic!("unexpected {e:?}"),
        }
        let err = build_system(&WeightSignature::new(&[2, 3, 5]).unwrap()).unwrap_err();
        assert!(matches!(
            err,
            Error::NonEllipticSignature {
                classification: "finite",
                ..
            }
        ));
        assert_eq!(WeightSignature::new(&[1, 3]), Err(Error::InvalidWeight(1)));
    }

    #[test]
    fn basis_pairings() {
        let s = sys(&[3, 3, 3]);
        let a0 = s.basis_vector(BasisLabel::V0).unwrap();
        let a11 = s.basis_vector(BasisLabel::arm(1, 1)).unwrap();
        let a12 = s.basis_vector(BasisLabel::arm(1, 2)).unwrap();
        assert_eq!(s.pairing(&a0, &a0).unwrap(), 2);
        assert_eq!(s.pairing(&a11, &a12).unwrap(), -1);
        for i in 0..s.rank() {
            assert_eq!(s.pairing(s.a(), &s.unit(i)).unwrap(), 0);
            assert_eq!(s.pairing(s.b(), &s.unit(i)).unwrap(), 0);
        }
        assert!(matches!(
            s.pairing(&a0, &LatticeVector(vec![1, 2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let s = sys(&[3, 3, 3]);
        let a0 = s.basis_vector(BasisLabel::V0).unwrap();
        assert_eq!(
            s.classify_vector(&a0).unwrap(),
            RootClass::RealRoot {
                finite_part: a0.clone(),
                m: 0,
                n: 0
            }
        );
        assert_eq!(
            s.classify_vector(s.b()).unwrap(),
            RootClass::ImaginaryRoot { m: 1, n: 0 }
        );
        assert_eq!(
            s.classify_vector(&(&a0 + s.a())).unwrap(),
            RootClass::RealRoot {
                finite_part: a0.clone(),
                m: 0,
                n: 1
            }
        );
        assert_eq!(
            s.classify_vector(&LatticeVector::zero(8)).unwrap(),
            RootClass::NotRoot
        );
        assert_eq!(
            s.classify_vector(&(2 * &a0)).unwrap(),
            RootClass::NotRoot
        );
        let x = &s.unit(2) + &s.unit(4);
        assert_eq!(s.norm(&x), 4);
        assert_eq!(s.classify_vector(&x).unwrap(), RootClass::NotRoot);
    }

    #[test]
    fn finite_root_counts() {
        assert_eq!(sys(&[3, 3, 3]).finite_root_count(), 72);
        assert_eq!(sys(&[4, 4, 2]).finite_root_count(), 126);
        assert_eq!(sys(&[6, 3, 2]).finite_root_count(), 240);
        assert_eq!(sys(&[2, 2, 2, 2]).finite_root_count(), 24);
        // permuted signature gives the same count
        assert_eq!(sys(&[2, 4, 4]).finite_root_count(), 126);
    }

    #[test]
    fn enumeration_window() {
        let s = sys(&[3, 3, 3]);
        assert_eq!(s.enumerate_roots(0, 0).unwrap().len(), 72);
        let w = s.enumerate_roots(1, 1).unwrap();
        assert_eq!(w.len(), 648);
        assert!(w.windows(2).all(|p| p[0] < p[1]));
        let base = s.enumerate_roots(0, 0).unwrap();
        for i in 1..s.rank() {
            assert!(base.contains(&s.unit(i)), "basis vector {i} missing");
        }
        // α_{-1} = α_0 - a sits at n = -1
        assert!(!base.contains(&s.unit(0)));
        assert!(s.enumerate_roots(0, 1).unwrap().contains(&s.unit(0)));
        assert!(matches!(
            s.enumerate_roots_capped(5, 5, 100),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn structural_invariants() {
        for sig in WeightSignature::elliptic_signatures() {
            let s = build_system(&sig).unwrap();
            assert_eq!(s.radical_rank(), 2);
            assert!(s.gram_min_eigenvalue() > -1e-9);
            assert!(s.radical_frame_saturated());
            assert!(s.is_connected());
            assert!(s.marks()[1..].iter().all(|&m| m > 0));
            assert_eq!(s.marks()[s.index_of(s.extremal_vertex()).unwrap()], 1);
        }
    }

    #[test]
    fn json_round_trip_and_labels() {
        let s = sys(&[4, 4, 2]);
        let j = serde_json::to_string(&s.to_json()).unwrap();
        assert!(j.starts_with("{\"weights\":[4,4,2],\"basis\":[\"vMinus1\",\"v0\",\"arm(1,1)\""));
        let back: RootSystemJson = serde_json::from_str(&j).unwrap();
        assert_eq!(RootSystemData::from_json(&back).unwrap(), s);
        let mut bad = back.clone();
        bad.gram[0][1] = 1;
        assert!(RootSystemData::from_json(&bad).is_err());
        assert_eq!("arm(2,3)".parse::<BasisLabel>().unwrap(), BasisLabel::arm(2, 3));
        assert!("arm(2)".parse::<BasisLabel>().is_err());
    }
}
