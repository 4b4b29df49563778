//! Simultaneous root finding for complex polynomials (Aberth-Ehrlich).
//!
//! All iterates are updated together; the pairwise repulsion term keeps them
//! on distinct roots. Initial guesses sit on a circle sized by a Cauchy-type
//! bound on the root moduli, equally spaced with a fixed 0.4-radian offset
//! so that no guess lands on a symmetry axis of the polynomial.

use num_complex::Complex64;

use super::RenderError;

/// Corrections below this relative size count as converged.
const STEP_TOL: f64 = 1e-14;

/// All complex roots of the polynomial with ascending `coeffs`.
///
/// Returned roots satisfy `|poly(root)| <= tol * scale(root)` where
/// `scale(z) = sum_k |c_k| |z|^k`; otherwise the call fails with
/// [`RenderError::NoConvergence`].
pub fn poly_roots(
    coeffs: &[Complex64],
    tol: f64,
    max_iter: u32,
) -> Result<Vec<Complex64>, RenderError> {
    aberth(coeffs, tol, max_iter, None)
}

/// [`poly_roots`] seeded with caller-supplied initial guesses (one per
/// root); falls back to the standard circle when the count does not match.
pub fn poly_roots_with_guesses(
    coeffs: &[Complex64],
    tol: f64,
    max_iter: u32,
    guesses: Option<&[Complex64]>,
) -> Result<Vec<Complex64>, RenderError> {
    aberth(coeffs, tol, max_iter, guesses)
}

/// [`poly_roots`] with optional warm-start guesses (used by inverse
/// iteration, where consecutive polynomials differ only in low-order
/// coefficients and the previous root set is an excellent initializer).
pub(crate) fn aberth(
    coeffs: &[Complex64],
    tol: f64,
    max_iter: u32,
    warm_start: Option<&[Complex64]>,
) -> Result<Vec<Complex64>, RenderError> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(RenderError::InvalidPolynomial(
            "degree must be at least 1".into(),
        ));
    }
    if coeffs
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(RenderError::InvalidPolynomial(
            "coefficients must be finite".into(),
        ));
    }
    let lead = coeffs[n];
    if lead == Complex64::new(0.0, 0.0) {
        return Err(RenderError::InvalidPolynomial(
            "leading coefficient is zero".into(),
        ));
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }

    // Roots cluster around their centroid, not around the origin; center
    // the starting circle there and size it from the recentered
    // coefficients, otherwise a far-off centroid inflates the radius bound
    // and the iteration spends hundreds of sweeps drifting inward. The
    // geometric mean of the root moduli (|q_0/q_n|^(1/n)) interleaves the
    // guesses with ring-like root configurations; the Fujiwara bound is
    // kept as a fallback when a root sits exactly on the centroid.
    let centroid = -coeffs[n - 1] / (coeffs[n] * n as f64);
    let centered = taylor_shift(coeffs, centroid);
    let bound = root_radius_bound(&centered);
    let gm = (centered[0].norm() / centered[n].norm()).powf(1.0 / n as f64);
    let radius = if gm.is_finite() && gm > 0.0 {
        gm.min(bound)
    } else {
        bound
    };
    let mut z: Vec<Complex64> = match warm_start {
        Some(ws) if ws.len() == n => ws.to_vec(),
        _ => initial_circle(n, radius)
            .into_iter()
            .map(|g| g + centroid)
            .collect(),
    };

    // Residuals at the f64 evaluation noise floor are indistinguishable
    // from an exact root; anything reliably below a few eps * scale stops.
    let residual_floor = 4.0 * f64::EPSILON;

    let mut iterations = 0;
    let mut quiet_sweeps = 0u32;
    // Two iterates occasionally settle on the same simple root while another
    // goes unclaimed; re-seeding one of the pair recovers it. The budget
    // keeps genuine multiple roots (legitimate coincident iterates) from
    // cycling forever.
    let mut rescue_budget = n;
    let mut rescues = 0usize;
    for iter in 1..=max_iter {
        iterations = iter;
        let mut all_small = true;
        let mut max_rel_step = 0.0f64;

        if iter > 4 && rescue_budget > 0 {
            for i in 0..n {
                for j in (i + 1)..n {
                    if rescue_budget == 0 {
                        break;
                    }
                    if (z[i] - z[j]).norm() <= 1e-8 * (1.0 + z[i].norm()) {
                        let angle = 0.4 + 2.399_963_229_728_653 * rescues as f64;
                        z[j] = centroid + Complex64::from_polar(radius * 1.05, angle);
                        rescues += 1;
                        rescue_budget -= 1;
                        all_small = false;
                    }
                }
            }
        }
        for i in 0..n {
            let (p, dp) = horner_pair(coeffs, z[i]);
            let scale = magnitude_scale(coeffs, z[i].norm());
            if p.norm() <= residual_floor * scale {
                continue;
            }
            let newton = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    repulsion += (z[i] - z[j]).finv();
                }
            }
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            let step = if step.is_finite() { step } else { newton };
            if !step.is_finite() {
                // Stalled on a critical point; nudge deterministically.
                z[i] += Complex64::from_polar(radius * 1e-6, 0.7 * (i as f64 + 1.0));
                all_small = false;
                continue;
            }
            z[i] -= step;
            if !z[i].is_finite() {
                z[i] = initial_circle(n, radius)[i] + centroid;
                all_small = false;
                continue;
            }
            let rel = step.norm() / (1.0 + z[i].norm());
            max_rel_step = max_rel_step.max(rel);
            if rel > STEP_TOL {
                all_small = false;
            }
        }
        if all_small {
            break;
        }
        // Iterates rattling inside the evaluation-noise ball never meet the
        // strict step tolerance; three quiet sweeps are as converged as f64
        // arithmetic gets.
        if max_rel_step <= 1e-11 {
            quiet_sweeps += 1;
            if quiet_sweeps >= 3 {
                break;
            }
        } else {
            quiet_sweeps = 0;
        }
    }

    // Plain Horner leaves each iterate rattling in a noise ball of radius
    // ~eps * scale / |p'|; a few Newton steps with compensated evaluation
    // shrink it to the conditioning limit of the coefficients themselves.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (_, dp) = horner_pair(coeffs, *zi);
            let p = horner_compensated(coeffs, *zi);
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + zi.norm()) {
                break;
            }
        }
    }

    for &root in &z {
        let (p, _) = horner_pair(coeffs, root);
        let scale = magnitude_scale(coeffs, root.norm());
        if !(p.norm() <= tol * scale) {
            return Err(RenderError::NoConvergence { iterations });
        }
    }
    Ok(z)
}

/// Double-double helpers for the compensated Horner evaluation.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    let lo = s.lo + a.lo + b.lo;
    let t = two_sum(s.hi, lo);
    Dd { hi: t.hi, lo: t.lo }
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let p = two_prod(a.hi, b.hi);
    let lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    let t = two_sum(p.hi, lo);
    Dd { hi: t.hi, lo: t.lo }
}

#[derive(Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn from_c(z: Complex64) -> Self {
        CDd {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn cdd_add(a: CDd, b: CDd) -> CDd {
    CDd {
        re: dd_add(a.re, b.re),
        im: dd_add(a.im, b.im),
    }
}

fn cdd_mul(a: CDd, b: CDd) -> CDd {
    let rr = dd_mul(a.re, b.re);
    let ii = dd_mul(a.im, b.im);
    let ri = dd_mul(a.re, b.im);
    let ir = dd_mul(a.im, b.re);
    CDd {
        re: dd_add(
            rr,
            Dd {
                hi: -ii.hi,
                lo: -ii.lo,
            },
        ),
        im: dd_add(ri, ir),
    }
}

/// Horner evaluation carried in double-double components; the result is
/// accurate to ~1 ulp of the true value even under heavy cancellation.
fn horner_compensated(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let zz = CDd::from_c(z);
    let mut acc = CDd::from_c(coeffs[coeffs.len() - 1]);
    for &c in coeffs.iter().rev().skip(1) {
        acc = cdd_add(cdd_mul(acc, zz), CDd::from_c(c));
    }
    acc.value()
}

fn initial_circle(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let angle = 0.4 + std::f64::consts::TAU * i as f64 / n as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// Coefficients of `p(z + shift)`: repeated synthetic division by
/// `(z - shift)`, remainders become the shifted coefficients in place.
fn taylor_shift(coeffs: &[Complex64], shift: Complex64) -> Vec<Complex64> {
    let mut a = coeffs.to_vec();
    let n = a.len() - 1;
    for k in 0..n {
        for i in (k..n).rev() {
            let next = a[i + 1];
            a[i] += shift * next;
        }
    }
    a
}

/// Cauchy-type (Fujiwara) bound on root moduli from coefficient magnitudes.
fn root_radius_bound(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let mut r = 0.0f64;
    for k in 1..=n {
        let c = coeffs[n - k].norm();
        if c > 0.0 {
            r = r.max((c / lead).powf(1.0 / k as f64));
        }
    }
    (2.0 * r).max(1e-3)
}

/// Horner evaluation of the polynomial and its derivative.
fn horner_pair(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n];
    let mut dp = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[k];
    }
    (p, dp)
}

/// `sum_k |c_k| |z|^k`, the magnitude norm that scales evaluation noise.
fn magnitude_scale(coeffs: &[Complex64], z_norm: f64) -> f64 {
    let mut s = 0.0f64;
    for c in coeffs.iter().rev() {
        s = s * z_norm + c.norm();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
        let mut coeffs = vec![c(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![c(0.0, 0.0); coeffs.len() + 1];
            for (k, &q) in coeffs.iter().enumerate() {
                next[k + 1] += q;
                next[k] -= q * r;
            }
            coeffs = next;
        }
        coeffs
    }

    fn sort_by_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v
    }

    #[test]
    fn quadratic_roots() {
        // z^2 - 1
        let roots = poly_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-12, 100).unwrap();
        let roots = sort_by_re(roots);
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cubic_with_known_roots() {
        // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
        let roots = poly_roots(
            &[c(-6.0, 0.0), c(11.0, 0.0), c(-6.0, 0.0), c(1.0, 0.0)],
            1e-12,
            100,
        )
        .unwrap();
        let roots = sort_by_re(roots);
        for (got, want) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn linear_closed_form() {
        let roots = poly_roots(&[c(3.0, 0.0), c(2.0, 0.0)], 1e-12, 10).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - c(-1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(poly_roots(&[c(1.0, 0.0)], 1e-12, 10).is_err());
        assert!(poly_roots(&[c(1.0, 0.0), c(0.0, 0.0)], 1e-12, 10).is_err());
    }

    #[test]
    fn degree_fifty_from_random_roots() {
        // Deterministic pseudo-random roots in |z| < 2.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let roots: Vec<Complex64> = (0..50)
            .map(|_| {
                let r = 2.0 * next().sqrt();
                let t = std::f64::consts::TAU * next();
                Complex64::from_polar(r, t)
            })
            .collect();
        let coeffs = poly_from_roots(&roots);
        let got = poly_roots(&coeffs, 1e-12, 200).unwrap();
        // Greedy global matching; with errors far below spacing this is the
        // optimal assignment.
        let mut used = vec![false; got.len()];
        let mut worst = 0.0f64;
        for &want in &roots {
            let (best, dist) = got
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, &g)| (j, (g - want).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[best] = true;
            worst = worst.max(dist);
        }
        assert!(worst < 1e-8, "worst recovery error {worst}");
    }

    #[test]
    fn degree_one_hundred_certification() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let roots: Vec<Complex64> = (0..100)
            .map(|_| {
                let r = 2.0 * next().sqrt();
                let t = std::f64::consts::TAU * next();
                Complex64::from_polar(r, t)
            })
            .collect();
        let coeffs = poly_from_roots(&roots);
        let got = poly_roots(&coeffs, 1e-12, 400).unwrap();
        assert_eq!(got.len(), 100);
        for &root in &got {
            let (p, _) = horner_pair(&coeffs, root);
            let scale = magnitude_scale(&coeffs, root.norm());
            assert!(p.norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn reconstruction_matches_for_moderate_degrees() {
        let roots: Vec<Complex64> = (0..30)
            .map(|k| Complex64::from_polar(0.5 + 0.05 * k as f64, 0.37 * k as f64))
            .collect();
        let coeffs = poly_from_roots(&roots);
        let got = poly_roots(&coeffs, 1e-12, 200).unwrap();
        let rebuilt = poly_from_roots(&got);
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        for (a, b) in coeffs.iter().zip(&rebuilt) {
            assert!((a - b).norm() <= 1e-6 * scale, "{a} vs {b}");
        }
    }
}
