//! Brute-force reference computations used to cross-check the fast paths.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::charge_domains::{ExactCharge, FloatCharge};
use crate::k_model::mukai;
use crate::rational::{cross, Rational};
use crate::root_lattice::{LatticeVector, RootSystemData};
use crate::walls::{span_key, wall_candidates, Rank2WallLattice};
use crate::weyl_action::reflection_matrix;

/// Real roots modulo the radical, as the orbit of the simple roots under
/// the simple reflections.
pub fn finite_roots_by_orbit(sys: &RootSystemData) -> BTreeSet<LatticeVector> {
    let refl: Vec<_> = (0..sys.rank())
        .map(|i| reflection_matrix(sys, &sys.unit(i)).expect("simple root"))
        .collect();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..sys.rank() {
        let f = sys.decompose(&sys.unit(i)).0;
        if seen.insert(f.clone()) {
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        for r in &refl {
            let g = sys.decompose(&LatticeVector(r.mul_vec(f.coords()))).0;
            if seen.insert(g.clone()) {
                queue.push_back(g);
            }
        }
    }
    seen
}

/// Exact regularity over every real and imaginary root with `|m|, |n| <= bound`.
///
/// Charges are scaled to integers so the inner loop runs on `i128`.
pub fn regular_by_brute_force(sys: &RootSystemData, z: &ExactCharge, bound: i64) -> bool {
    let den = z
        .values()
        .iter()
        .fold(1i128, |d, c| d.lcm(c.re.denom()).lcm(c.im.denom()));
    let scale = |q: &Rational| (*q * Rational::from_integer(den)).to_integer();
    let int_eval = |x: &LatticeVector| {
        let v = z.eval(x);
        (scale(&v.re), scale(&v.im))
    };
    let (ta_re, ta_im) = int_eval(sys.b());
    let (a_re, a_im) = int_eval(sys.a());
    let finite: Vec<(i128, i128)> = sys.finite_roots().iter().map(int_eval).collect();
    let hit_real = finite.par_iter().any(|&(fr, fi)| {
        (-bound..=bound).any(|m| {
            (-bound..=bound).any(|n| {
                let (m, n) = (m as i128, n as i128);
                fr + m * ta_re + n * a_re == 0 && fi + m * ta_im + n * a_im == 0
            })
        })
    });
    let hit_imaginary = (-bound..=bound).any(|m| {
        (-bound..=bound).any(|n| {
            let (m, n) = (m as i128, n as i128);
            (m, n) != (0, 0) && m * ta_re + n * a_re == 0 && m * ta_im + n * a_im == 0
        })
    });
    !(hit_real || hit_imaginary)
}

/// Spherical classes `x·v + y·w` with `|x|, |y| <= bound`, sorted.
pub fn spherical_by_brute_force(
    sys: &RootSystemData,
    h: &Rank2WallLattice,
    bound: i64,
) -> Vec<LatticeVector> {
    let mut out = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            let c = &(x * &h.v) + &(y * &h.w);
            if mukai(sys, &c, &c).expect("same rank") == -2 {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}

/// A wall crossing found by sampling: span key of `{v, w}`, the smallest
/// partner seen, and the bisected parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct GridCrossing {
    pub key: Vec<Rational>,
    pub partner: LatticeVector,
    pub t: f64,
}

/// Sign changes of `im(Z_t(w)·conj Z_t(v))` on `samples + 1` equally spaced
/// points, refined by bisection. Crossings of partners sharing a span are
/// merged when their parameters agree to `1e-9`.
pub fn grid_wall_oracle(
    sys: &RootSystemData,
    v: &LatticeVector,
    zs: &FloatCharge,
    ze: &FloatCharge,
    m_bound: i64,
    n_bound: i64,
    samples: usize,
) -> Vec<GridCrossing> {
    let candidates = wall_candidates(sys, v, m_bound, n_bound).expect("valid class and bounds");
    let (sv, ev) = (zs.eval(v), ze.eval(v));
    let at = |s: Complex<f64>, e: Complex<f64>, t: f64| s + (e - s) * t;
    let mut found: Vec<GridCrossing> = candidates
        .par_iter()
        .flat_map_iter(|h| {
            let (sw, ew) = (zs.eval(&h.w), ze.eval(&h.w));
            let f = move |t: f64| cross(&at(sw, ew, t), &at(sv, ev, t));
            let mut out = Vec::new();
            let mut prev = f(0.0);
            for i in 1..=samples {
                let t1 = i as f64 / samples as f64;
                let cur = f(t1);
                if prev.signum() != cur.signum() && !prev.is_zero() {
                    let (mut lo, mut hi) = ((i - 1) as f64 / samples as f64, t1);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        if f(mid).signum() == prev.signum() {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    out.push(GridCrossing {
                        key: span_key(v, &h.w),
                        partner: h.w.clone(),
                        t: 0.5 * (lo + hi),
                    });
                }
                if !cur.is_zero() {
                    prev = cur;
                }
            }
            out.into_iter()
        })
        .collect();
    found.sort_by(|a, b| a.key.cmp(&b.key).then(a.t.total_cmp(&b.t)));
    let mut merged: Vec<GridCrossing> = Vec::new();
    for c in found {
        match merged.last_mut() {
            Some(last) if last.key == c.key && (last.t - c.t).abs() <= 1e-9 => {
                if c.partner < last.partner {
                    last.partner = c.partner;
                }
            }
            _ => merged.push(c),
        }
    }
    merged.sort_by(|a, b| a.t.total_cmp(&b.t).then_with(|| a.partner.cmp(&b.partner)));
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charge_domains::sample_e_charge;
    use crate::root_lattice::{build_system, WeightSignature};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orbit_counts() {
        let counts: Vec<usize> = WeightSignature::elliptic_signatures()
            .iter()
            .map(|s| finite_roots_by_orbit(&build_system(s).unwrap()).len())
            .collect();
        assert_eq!(counts, vec![72, 126, 240, 24]);
    }

    #[test]
    fn regular_oracle_detects_vanishing() {
        let s = build_system(&WeightSignature::new(&[2, 2, 2, 2]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let z = sample_e_charge(&s, &mut rng);
        let mut values = z.values().to_vec();
        // Z(α_{(1,1)}) = 0 makes the charge singular
        values[2] = Complex::new(Rational::zero(), Rational::zero());
        assert!(!regular_by_brute_force(&s, &ExactCharge::new(values), 3));
    }
}
