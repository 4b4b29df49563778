//! Inverse iteration: sample the Julia set by walking a random backward
//! orbit. Each step finds all `N + k` solutions of `g(z) = w` and picks one
//! uniformly at random; backward orbits accumulate on the Julia set, so
//! after a burn-in the visited points sample it.
//!
//! The preimage equation is the polynomial `P(z) - (w - p) Q(z) = 0`, but
//! with many dipoles its expanded coefficients span so many orders of
//! magnitude that f64 evaluation near the dipole cluster is pure noise
//! (coefficients ~1e31 put the Horner noise floor ~1e28 where the values
//! are ~1e-15). The same Aberth-Ehrlich iteration therefore runs on the
//! factored form, which is well conditioned everywhere:
//!
//! ```text
//! h(z)  = C (z-p)^N prod (z-a_i)/(z-b_i)        (so g = p + h)
//! L(z)  = h'/h = N/(z-p) + sum 1/(z-a_i) - sum 1/(z-b_i)
//! p'/p  = h L / (h - c) + sum 1/(z-b_i),        c = w - p
//! step  = 1 / (p'/p - sum_{j != i} 1/(z_i - z_j))
//! ```
//!
//! Initial guesses come from the map structure -- the base-map preimages of
//! `w` plus one guess per dipole center -- and every accepted root must map
//! back onto `w` under the factored evaluation.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CloudMethod, JuliaCloud, RenderError};
use crate::limit::preimage_point;
use crate::rmap::{DipoleMap, SpherePoint};

const MAX_SWEEPS: u32 = 200;

/// Relative step size below which an iterate counts as settled.
const STEP_TOL: f64 = 1e-13;

/// Residual `|h - c|` below this relative floor freezes an iterate; the
/// factored evaluation of `h` carries ~k eps of relative noise.
const VALUE_TOL: f64 = 1e-12;

/// Every accepted preimage must satisfy `|g(root) - w|` at this relative
/// tolerance; several orders above the evaluation noise floor, several
/// below anything that would distort the sampled cloud.
const DYNAMIC_TOL: f64 = 1e-8;

/// Backward orbit of `seed`: `count` points retained after `burn_in` steps.
/// Deterministic for a fixed `rng_seed`.
pub fn inverse_orbit(
    map: &DipoleMap,
    seed: Complex64,
    count: usize,
    burn_in: usize,
    rng_seed: u64,
) -> Result<JuliaCloud, RenderError> {
    if count == 0 {
        return Err(RenderError::BadRequest("count must be at least 1".into()));
    }
    if seed == map.base().center() || !seed.is_finite() {
        return Err(RenderError::FixedPointSeed);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut w = seed;
    let mut points = Vec::with_capacity(count);
    let mut warm: Option<Vec<Complex64>> = None;
    for step in 0..burn_in + count {
        let roots = match warm.take() {
            // Warm-started sweeps occasionally straddle two preimages;
            // retry from the structural guesses before giving up.
            Some(prev) => preimages(map, w, Some(prev)).or_else(|_| preimages(map, w, None)),
            None => preimages(map, w, None),
        }?;
        w = roots[pick_branch(map, &roots, &mut rng)];
        warm = Some(roots);
        if step >= burn_in {
            points.push(w);
        }
    }
    Ok(JuliaCloud {
        points,
        method: CloudMethod::Inverse {
            count,
            burn_in,
            seed: rng_seed,
        },
    })
}

/// Choose a preimage branch with probability proportional to `1/|g'|`.
///
/// Uniform branch choice samples the balanced measure, which piles onto the
/// dipole decorations (k of the k+N preimages of any point sit there) and
/// visits the circle component almost never; weighting by the inverse
/// derivative redistributes mass toward arclength, covering the whole set
/// with a short orbit. Branch weights cap at 1e12 so an accidental critical
/// point cannot absorb the walk.
fn pick_branch(map: &DipoleMap, roots: &[Complex64], rng: &mut ChaCha8Rng) -> usize {
    let mut weights = Vec::with_capacity(roots.len());
    let mut total = 0.0f64;
    for &z in roots {
        let weight = match eval_factored(map, z) {
            Some((h, log_deriv)) => {
                let dg = (h * log_deriv).norm();
                if dg.is_finite() {
                    (1.0 / dg.max(1e-12)).min(1e12)
                } else {
                    0.0
                }
            }
            None => 0.0,
        };
        weights.push(weight);
        total += weight;
    }
    if !(total > 0.0) || !total.is_finite() {
        return rng.random_range(0..roots.len());
    }
    let mut ticket = rng.random::<f64>() * total;
    for (i, &weight) in weights.iter().enumerate() {
        ticket -= weight;
        if ticket <= 0.0 {
            return i;
        }
    }
    roots.len() - 1
}

/// All `N + k` solutions of `g(z) = w`, each verified to map back onto `w`.
fn preimages(
    map: &DipoleMap,
    w: Complex64,
    start: Option<Vec<Complex64>>,
) -> Result<Vec<Complex64>, RenderError> {
    let degree = map.numerator_degree() as usize;
    let mut z = match start {
        Some(s) if s.len() == degree => s,
        _ => structural_guesses(map, w)?,
    };
    let p = map.base().center();
    let c = w - p;
    let c_scale = 1.0 + c.norm();

    for _ in 0..MAX_SWEEPS {
        let mut settled = true;
        for i in 0..degree {
            let (h, log_deriv) = match eval_factored(map, z[i]) {
                Some(pair) => pair,
                None => {
                    // On a pole or the center: nudge off deterministically.
                    z[i] += Complex64::from_polar(1e-9 * c_scale, 0.7 * (i as f64 + 1.0));
                    settled = false;
                    continue;
                }
            };
            let residual = h - c;
            if residual.norm() <= VALUE_TOL * c_scale {
                continue;
            }
            let mut ratio = h * log_deriv / residual;
            for b in map.poles() {
                ratio += (z[i] - b).finv();
            }
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..degree {
                if j != i {
                    repulsion += (z[i] - z[j]).finv();
                }
            }
            let step = (ratio - repulsion).finv();
            if !step.is_finite() {
                z[i] += Complex64::from_polar(1e-9 * c_scale, 0.7 * (i as f64 + 1.0));
                settled = false;
                continue;
            }
            z[i] -= step;
            if !z[i].is_finite() {
                z[i] = structural_guesses(map, w)?[i];
                settled = false;
                continue;
            }
            if step.norm() > STEP_TOL * (1.0 + z[i].norm()) {
                settled = false;
            }
        }
        if settled {
            break;
        }
    }

    for &root in &z {
        let ok = match map.eval_complex(root) {
            SpherePoint::Infinity => false,
            SpherePoint::Finite(g) => (g - w).norm() <= DYNAMIC_TOL * (1.0 + w.norm()),
        };
        if !ok {
            return Err(RenderError::NoConvergence {
                iterations: MAX_SWEEPS,
            });
        }
    }
    Ok(z)
}

/// Initial guesses from the map structure: as the dipole separation
/// shrinks, the preimages of `w` converge to the base-map preimages plus
/// one point per dipole.
fn structural_guesses(map: &DipoleMap, w: Complex64) -> Result<Vec<Complex64>, RenderError> {
    let mut guesses = preimage_point(map.base(), w).map_err(|_| RenderError::FixedPointSeed)?;
    guesses.extend(map.dipoles().iter().map(|d| d.center));
    Ok(guesses)
}

/// Factored `h(z) = C (z-p)^N prod (z-a_i)/(z-b_i)` and its logarithmic
/// derivative; `None` on a pole or at the center (where the log-derivative
/// blows up).
fn eval_factored(map: &DipoleMap, z: Complex64) -> Option<(Complex64, Complex64)> {
    let p = map.base().center();
    let n = map.base().degree();
    let zp = z - p;
    let zp_norm_sqr = zp.norm_sqr();
    if zp_norm_sqr <= 1e-28 {
        return None;
    }
    let mut num = map.base().scale();
    let mut den = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        num *= zp;
    }
    let mut log_deriv = zp.finv() * n as f64;
    let zeros = map.zeros();
    let poles = map.poles();
    for i in 0..zeros.len() {
        let da = z - zeros[i];
        let db = z - poles[i];
        if db.norm_sqr() <= 1e-28 {
            return None;
        }
        num *= da;
        den *= db;
        log_deriv += da.finv() - db.finv();
        if i & 15 == 15 {
            let m = num.norm_sqr().max(den.norm_sqr());
            if m > 1e200 {
                num *= 1e-100;
                den *= 1e-100;
            } else if m < 1e-200 && m > 0.0 {
                num *= 1e100;
                den *= 1e100;
            }
        }
    }
    let h = num / den;
    if !h.is_finite() || !log_deriv.is_finite() {
        return None;
    }
    Some((h, log_deriv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmap::BaseMap;

    #[test]
    fn squaring_orbit_lands_on_the_unit_circle() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let cloud = inverse_orbit(&map, Complex64::new(2.0, 0.0), 2000, 50, 1).unwrap();
        assert_eq!(cloud.points.len(), 2000);
        for z in &cloud.points {
            assert!((z.norm() - 1.0).abs() < 0.02, "|{z}| strays");
        }
    }

    #[test]
    fn orbits_are_deterministic() {
        let map = DipoleMap::bare(BaseMap::power(3).unwrap());
        let a = inverse_orbit(&map, Complex64::new(1.7, 0.4), 500, 20, 42).unwrap();
        let b = inverse_orbit(&map, Complex64::new(1.7, 0.4), 500, 20, 42).unwrap();
        assert_eq!(a.points, b.points);
        let c = inverse_orbit(&map, Complex64::new(1.7, 0.4), 500, 20, 43).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn fixed_point_seed_is_rejected() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        assert!(matches!(
            inverse_orbit(&map, Complex64::new(0.0, 0.0), 10, 0, 0),
            Err(RenderError::FixedPointSeed)
        ));
    }

    #[test]
    fn every_orbit_point_maps_onto_its_predecessor() {
        let base = BaseMap::power(2).unwrap();
        let dipole = crate::rmap::Dipole::new(Complex64::new(1.4, 0.2), 0.08, 0.0).unwrap();
        let map = DipoleMap::new(base, vec![dipole]).unwrap();
        let cloud = inverse_orbit(&map, Complex64::new(2.0, 0.0), 300, 0, 7).unwrap();
        let mut prev = Complex64::new(2.0, 0.0);
        for &z in &cloud.points {
            let g = map.eval_complex(z).as_complex().unwrap();
            assert!(
                (g - prev).norm() <= 1e-6 * (1.0 + prev.norm()),
                "g({z}) = {g} != {prev}"
            );
            prev = z;
        }
    }

    #[test]
    fn preimage_count_matches_the_degree() {
        let base = BaseMap::power(2).unwrap();
        let dipoles = vec![
            crate::rmap::Dipole::new(Complex64::new(1.3, 0.4), 0.06, 0.0).unwrap(),
            crate::rmap::Dipole::new(Complex64::new(-1.5, 0.2), 0.06, std::f64::consts::PI)
                .unwrap(),
        ];
        let map = DipoleMap::new(base, dipoles).unwrap();
        let roots = preimages(&map, Complex64::new(0.9, 1.1), None).unwrap();
        assert_eq!(roots.len(), 4);
        // All distinct: no two iterates collapsed onto one preimage.
        for i in 0..roots.len() {
            for j in 0..i {
                assert!((roots[i] - roots[j]).norm() > 1e-6);
            }
        }
    }
}
