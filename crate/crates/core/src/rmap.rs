//! Base power maps, dipoles, and the composite rational map.
//!
//! The base map is `f(z) = p + C (z - p)^N`; its Julia set is the circle
//! `|z - p| = |C|^(-1/(N-1))` and both `p` and `infinity` are superattracting
//! fixed points. A dipole is a degree-1 factor `(z - a)/(z - b)` whose zero
//! and pole straddle a center `c` at separation `eps`; far from the pair the
//! factor is close to 1. The composite map multiplies the base map by one
//! dipole per target point:
//!
//! ```text
//! g(z) = p + C (z - p)^N * prod_i (z - a_i) / (z - b_i)
//! ```
//!
//! Evaluation always uses this factored form; the expanded numerator and
//! denominator coefficients exist only for root finding, where a polynomial
//! representation is unavoidable.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Squared distance below which a point counts as sitting on a pole.
const POLE_EPS_SQ: f64 = 1e-24;

/// Sample count per circle when certifying escape radii.
const CERTIFY_SAMPLES: usize = 4096;

/// Shrink/grow attempts before giving up on an escape radius.
const CERTIFY_RETRIES: usize = 40;

/// Relative slack for the sampled certificate; the analytic bound is strict,
/// the samples only need to clear f64 evaluation noise.
const CERTIFY_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("base map degree must be at least 2, got {degree}")]
    DegreeTooSmall { degree: u32 },
    #[error("base map scale must be nonzero")]
    ZeroScale,
    #[error("dipole separation must be positive and finite, got {separation}")]
    BadSeparation { separation: f64 },
    #[error("dipole zero or pole at {location} collides with the map center")]
    DipoleCollidesWithCenter { location: Complex64 },
    #[error("duplicate dipole zero/pole location at {location}")]
    DuplicatePoint { location: Complex64 },
    #[error("no valid escape radius (a dipole obstructs contraction or expansion)")]
    NoValidRadius,
    #[error("distance {dist} does not clear the dipole half-separation {half_sep}")]
    InsideDisk { dist: f64, half_sep: f64 },
}

/// A point on the Riemann sphere: either a finite complex number or the
/// point at infinity. Non-finite coordinates canonicalize to `Infinity`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn as_complex(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// `z^n` by binary exponentiation; exact for `z = 0`.
fn complex_powu(z: Complex64, n: u32) -> Complex64 {
    let mut result = Complex64::new(1.0, 0.0);
    let mut base = z;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result *= base;
        }
        base *= base;
        e >>= 1;
    }
    result
}

/// The map `f(z) = p + C (z - p)^N` with `N >= 2` and `C != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseMap {
    degree: u32,
    scale: Complex64,
    center: Complex64,
}

impl BaseMap {
    pub fn new(degree: u32, scale: Complex64, center: Complex64) -> Result<Self, MapError> {
        if degree < 2 {
            return Err(MapError::DegreeTooSmall { degree });
        }
        if scale == Complex64::new(0.0, 0.0) || !scale.re.is_finite() || !scale.im.is_finite() {
            return Err(MapError::ZeroScale);
        }
        Ok(BaseMap {
            degree,
            scale,
            center,
        })
    }

    /// The plain power map `z -> z^N`.
    pub fn power(degree: u32) -> Result<Self, MapError> {
        BaseMap::new(degree, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    /// Radius of the invariant circle `|z - p| = |C|^(-1/(N-1))`.
    ///
    /// On that circle `|f(z) - p| = |C| r^N = r`, so the circle maps to
    /// itself and separates the basins of `p` and infinity.
    pub fn circle_radius(&self) -> f64 {
        self.scale.norm().powf(-1.0 / (self.degree as f64 - 1.0))
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.center + self.scale * complex_powu(z - self.center, self.degree)
    }
}

/// A zero/pole pair at separation `eps` centered on `center`: the zero sits
/// at `c + (eps/2) e^{i theta}` and the pole at `c - (eps/2) e^{i theta}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dipole {
    pub center: Complex64,
    pub separation: f64,
    pub orientation: f64,
}

impl Dipole {
    pub fn new(center: Complex64, separation: f64, orientation: f64) -> Result<Self, MapError> {
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(MapError::BadSeparation { separation });
        }
        Ok(Dipole {
            center,
            separation,
            orientation,
        })
    }

    fn arm(&self) -> Complex64 {
        Complex64::from_polar(self.separation / 2.0, self.orientation)
    }

    /// The zero `a = c + (eps/2) e^{i theta}`.
    pub fn zero(&self) -> Complex64 {
        self.center + self.arm()
    }

    /// The pole `b = c - (eps/2) e^{i theta}`.
    pub fn pole(&self) -> Complex64 {
        self.center - self.arm()
    }

    pub fn zero_pole(&self) -> (Complex64, Complex64) {
        (self.zero(), self.pole())
    }

    /// Upper bound for `|(z-a)/(z-b) - 1|` whenever `|z - c| >= dist`.
    ///
    /// Since `(z-a)/(z-b) - 1 = (b-a)/(z-b)` and `|z-b| >= |z-c| - eps/2`,
    /// the factor deviates from 1 by at most `eps / (dist - eps/2)`.
    pub fn deviation_bound(&self, dist: f64) -> Result<f64, MapError> {
        let half = self.separation / 2.0;
        if dist <= half {
            return Err(MapError::InsideDisk {
                dist,
                half_sep: half,
            });
        }
        Ok(self.separation / (dist - half))
    }
}

/// Certified escape radii for a [`DipoleMap`].
///
/// `inner`: `|z - p| <= inner` implies `|g(z) - p| <= |z - p| / 2`.
/// `outer`: `|z| >= outer` implies `|g(z)| >= 2 |z|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscapeRadii {
    pub inner: f64,
    pub outer: f64,
}

/// The composite map `g(z) = p + C (z-p)^N prod_i (z-a_i)/(z-b_i)`.
///
/// Both `p` and infinity stay fixed: the product is finite and nonzero at
/// `p` (enforced at construction), and the numerator degree `N + k` exceeds
/// the denominator degree `k`.
#[derive(Clone, Debug)]
pub struct DipoleMap {
    base: BaseMap,
    dipoles: Vec<Dipole>,
    zeros: Vec<Complex64>,
    poles: Vec<Complex64>,
    expanded: OnceLock<(Vec<Complex64>, Vec<Complex64>)>,
}

impl DipoleMap {
    pub fn new(base: BaseMap, dipoles: Vec<Dipole>) -> Result<Self, MapError> {
        let mut zeros = Vec::with_capacity(dipoles.len());
        let mut poles = Vec::with_capacity(dipoles.len());
        for d in &dipoles {
            if !(d.separation > 0.0) || !d.separation.is_finite() {
                return Err(MapError::BadSeparation {
                    separation: d.separation,
                });
            }
            zeros.push(d.zero());
            poles.push(d.pole());
        }
        let mut all: Vec<Complex64> = Vec::with_capacity(2 * dipoles.len());
        for &q in zeros.iter().chain(poles.iter()) {
            if q == base.center() {
                return Err(MapError::DipoleCollidesWithCenter { location: q });
            }
            if all.contains(&q) {
                return Err(MapError::DuplicatePoint { location: q });
            }
            all.push(q);
        }
        Ok(DipoleMap {
            base,
            dipoles,
            zeros,
            poles,
            expanded: OnceLock::new(),
        })
    }

    /// The bare base map, as a composite with an empty dipole list.
    pub fn bare(base: BaseMap) -> Self {
        DipoleMap {
            base,
            dipoles: Vec::new(),
            zeros: Vec::new(),
            poles: Vec::new(),
            expanded: OnceLock::new(),
        }
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn dipoles(&self) -> &[Dipole] {
        &self.dipoles
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn numerator_degree(&self) -> u32 {
        self.base.degree() + self.dipoles.len() as u32
    }

    pub fn denominator_degree(&self) -> u32 {
        self.dipoles.len() as u32
    }

    /// Factored-form evaluation, total on the sphere.
    ///
    /// Points within 1e-12 of a pole map to infinity, infinity maps to
    /// itself, and any overflow canonicalizes to infinity.
    pub fn eval(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => SpherePoint::Infinity,
            SpherePoint::Finite(z) => self.eval_complex(z),
        }
    }

    /// [`DipoleMap::eval`] for a finite input, skipping the enum match.
    ///
    /// The dipole numerators and denominators accumulate separately with one
    /// division at the end; both products rescale together whenever they
    /// grow large, which leaves the ratio untouched.
    pub fn eval_complex(&self, z: Complex64) -> SpherePoint {
        let mut num = self.base.scale * complex_powu(z - self.base.center, self.base.degree);
        let mut den = Complex64::new(1.0, 0.0);
        for i in 0..self.zeros.len() {
            let d = z - self.poles[i];
            if d.norm_sqr() <= POLE_EPS_SQ {
                return SpherePoint::Infinity;
            }
            num *= z - self.zeros[i];
            den *= d;
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
        SpherePoint::from_complex(self.base.center + num / den)
    }

    /// The dipole product `prod_i (z-a_i)/(z-b_i)` alone.
    pub fn dipole_product(&self, z: Complex64) -> Complex64 {
        let mut w = Complex64::new(1.0, 0.0);
        for i in 0..self.zeros.len() {
            w *= (z - self.zeros[i]) / (z - self.poles[i]);
        }
        w
    }

    /// Ascending coefficients of `P` and `Q` with `g(z) - p = P(z)/Q(z)`,
    /// `deg P = N + k`, `deg Q = k`. Expanded once, then cached.
    pub fn expanded_coefficients(&self) -> (&[Complex64], &[Complex64]) {
        let (num, den) = self.expanded.get_or_init(|| self.expand());
        (num, den)
    }

    fn expand(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let p = self.base.center();
        let mut num = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..self.base.degree() {
            num = mul_linear(&num, p);
        }
        for &a in &self.zeros {
            num = mul_linear(&num, a);
        }
        for c in &mut num {
            *c *= self.base.scale();
        }
        let mut den = vec![Complex64::new(1.0, 0.0)];
        for &b in &self.poles {
            den = mul_linear(&den, b);
        }
        (num, den)
    }

    /// Certified inner/outer escape radii, found candidate-and-certify:
    /// start from the dipole-free closed forms adjusted by worst-case dipole
    /// deviation factors, then halve (inner) or double (outer) until both an
    /// analytic bound and a dense circle sample certify the inequality.
    pub fn escape_radii(&self) -> Result<EscapeRadii, MapError> {
        let inner = self.find_inner_radius()?;
        let outer = self.find_outer_radius()?;
        Ok(EscapeRadii { inner, outer })
    }

    fn find_inner_radius(&self) -> Result<f64, MapError> {
        let p = self.base.center();
        let n = self.base.degree() as f64;
        let capacity = 1.0 / (2.0 * self.base.scale().norm());
        let mut r = capacity.powf(1.0 / (n - 1.0));

        // Stay clear of the nearest pole, then shrink by the product of
        // worst-case dipole deviation factors at the candidate radius.
        if let Some(min_pole) = self
            .poles
            .iter()
            .map(|b| (b - p).norm())
            .min_by(|x, y| x.total_cmp(y))
        {
            if min_pole <= 0.0 {
                return Err(MapError::NoValidRadius);
            }
            r = r.min(0.75 * min_pole);
            let mut product = 1.0f64;
            for (d, b) in self.dipoles.iter().zip(&self.poles) {
                let dist = (b - p).norm() - r;
                if dist > 0.0 {
                    product *= 1.0 + d.separation / dist;
                }
            }
            if product.is_finite() && product > 1.0 {
                r /= product.powf(1.0 / (n - 1.0));
            }
        }

        for _ in 0..CERTIFY_RETRIES {
            if r > 0.0 && self.certify_inner(r) {
                return Ok(r);
            }
            r /= 2.0;
        }
        Err(MapError::NoValidRadius)
    }

    fn certify_inner(&self, r: f64) -> bool {
        let p = self.base.center();
        // All poles strictly outside the closed disk; with the disk free of
        // poles, (g(z)-p)/(z-p) is holomorphic there and the maximum modulus
        // principle promotes the circle bound to the whole disk.
        for b in &self.poles {
            if (b - p).norm() <= r {
                return false;
            }
        }
        // Analytic bound: |C| r^N prod (1 + eps_i / (|b_i - p| - r)) <= r/2.
        let mut bound = self.base.scale().norm() * r.powf(self.base.degree() as f64);
        for (d, b) in self.dipoles.iter().zip(&self.poles) {
            let dist = (b - p).norm() - r;
            bound *= 1.0 + d.separation / dist;
        }
        if !(bound <= r / 2.0) {
            return false;
        }
        // Dense sample of the circle confirms the certified inequality.
        for k in 0..CERTIFY_SAMPLES {
            let angle = std::f64::consts::TAU * k as f64 / CERTIFY_SAMPLES as f64;
            let z = p + Complex64::from_polar(r, angle);
            match self.eval_complex(z) {
                SpherePoint::Infinity => return false,
                SpherePoint::Finite(g) => {
                    if !((g - p).norm() <= r / 2.0 * (1.0 + CERTIFY_SLACK)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn find_outer_radius(&self) -> Result<f64, MapError> {
        let p_norm = self.base.center().norm();
        let n = self.base.degree() as f64;
        let mut r = (2.0 / self.base.scale().norm())
            .powf(1.0 / (n - 1.0))
            .max(2.0 * (p_norm + 1.0));
        for (d, q) in self
            .dipoles
            .iter()
            .zip(&self.poles)
            .chain(self.dipoles.iter().zip(&self.zeros))
        {
            r = r.max(q.norm() + d.separation + 1.0);
        }
        for _ in 0..CERTIFY_RETRIES {
            if r.is_finite() && self.certify_outer(r) {
                return Ok(r);
            }
            r *= 2.0;
        }
        Err(MapError::NoValidRadius)
    }

    fn certify_outer(&self, r: f64) -> bool {
        let p_norm = self.base.center().norm();
        if r <= p_norm {
            return false;
        }
        // Analytic lower bound on |z| = s for s >= r:
        //   |g(z)| >= |C| (s - |p|)^N prod (1 - eps_i / (s - |b_i|)) - |p|
        // Every factor is positive and increasing in s once it clears zero,
        // so certifying L(r) >= 2r extends to all s >= r.
        let mut lower = self.base.scale().norm() * (r - p_norm).powf(self.base.degree() as f64);
        for (d, b) in self.dipoles.iter().zip(&self.poles) {
            let dist = r - b.norm();
            if dist <= d.separation {
                return false;
            }
            lower *= 1.0 - d.separation / dist;
        }
        lower -= p_norm;
        if !(lower >= 2.0 * r) {
            return false;
        }
        for k in 0..CERTIFY_SAMPLES {
            let angle = std::f64::consts::TAU * k as f64 / CERTIFY_SAMPLES as f64;
            let z = Complex64::from_polar(r, angle);
            match self.eval_complex(z) {
                // Infinity certainly cleared 2|z|.
                SpherePoint::Infinity => {}
                SpherePoint::Finite(g) => {
                    if !(g.norm() >= 2.0 * r * (1.0 - CERTIFY_SLACK)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Multiply ascending `coeffs` by the linear factor `(z - root)`.
fn mul_linear(coeffs: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= c * root;
    }
    out
}

/// JSON interchange form of a map: `{"base": {"N", "C", "p"}, "dipoles": [...]}`
/// with complex numbers as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub base: BaseSpec,
    #[serde(default)]
    pub dipoles: Vec<DipoleSpec>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BaseSpec {
    #[serde(rename = "N")]
    pub degree: u32,
    #[serde(rename = "C")]
    pub scale: [f64; 2],
    pub p: [f64; 2],
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DipoleSpec {
    pub c: [f64; 2],
    pub eps: f64,
    pub theta: f64,
}

impl MapFile {
    pub fn from_map(map: &DipoleMap) -> Self {
        MapFile {
            base: BaseSpec {
                degree: map.base().degree(),
                scale: [map.base().scale().re, map.base().scale().im],
                p: [map.base().center().re, map.base().center().im],
            },
            dipoles: map
                .dipoles()
                .iter()
                .map(|d| DipoleSpec {
                    c: [d.center.re, d.center.im],
                    eps: d.separation,
                    theta: d.orientation,
                })
                .collect(),
        }
    }

    pub fn to_base(&self) -> Result<BaseMap, MapError> {
        BaseMap::new(
            self.base.degree,
            Complex64::new(self.base.scale[0], self.base.scale[1]),
            Complex64::new(self.base.p[0], self.base.p[1]),
        )
    }

    pub fn to_map(&self) -> Result<DipoleMap, MapError> {
        let base = self.to_base()?;
        let dipoles = self
            .dipoles
            .iter()
            .map(|d| Dipole::new(Complex64::new(d.c[0], d.c[1]), d.eps, d.theta))
            .collect::<Result<Vec<_>, _>>()?;
        DipoleMap::new(base, dipoles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn make_base_validates() {
        let f = BaseMap::new(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(f.apply(c(2.0, 0.0)), c(4.0, 0.0));
        assert!(matches!(
            BaseMap::new(1, c(1.0, 0.0), c(0.0, 0.0)),
            Err(MapError::DegreeTooSmall { degree: 1 })
        ));
        assert!(matches!(
            BaseMap::new(3, c(0.0, 0.0), c(0.0, 0.0)),
            Err(MapError::ZeroScale)
        ));
        // The center is fixed: f(p) = p exactly.
        let f = BaseMap::new(3, c(4.0, 0.0), c(1.0, 1.0)).unwrap();
        assert_eq!(f.apply(c(1.0, 1.0)), c(1.0, 1.0));
    }

    #[test]
    fn circle_radius_closed_form() {
        let f = BaseMap::power(2).unwrap();
        assert_eq!(f.circle_radius(), 1.0);
        // |C| r^N = r with C = 4, N = 3 gives r = 1/2.
        let f = BaseMap::new(3, c(4.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((f.circle_radius() - 0.5).abs() < 1e-15);
        // Translation leaves the radius alone.
        let f = BaseMap::new(5, c(1.0, 0.0), c(2.0, 1.0)).unwrap();
        assert_eq!(f.circle_radius(), 1.0);
    }

    #[test]
    fn dipole_zero_pole_placement() {
        let d = Dipole::new(c(1.0, 0.0), 0.2, 0.0).unwrap();
        let (a, b) = d.zero_pole();
        assert!((a - c(1.1, 0.0)).norm() < 1e-15);
        assert!((b - c(0.9, 0.0)).norm() < 1e-15);

        let d = Dipole::new(c(1.0, 0.0), 0.2, std::f64::consts::FRAC_PI_2).unwrap();
        let (a, b) = d.zero_pole();
        assert!((a - c(1.0, 0.1)).norm() < 1e-15);
        assert!((b - c(1.0, -0.1)).norm() < 1e-15);

        // A dipole centered at the origin keeps its zero and pole off zero,
        // so it is still a legal attachment to the plain power map.
        let d = Dipole::new(c(0.0, 0.0), 0.2, 0.0).unwrap();
        let base = BaseMap::power(2).unwrap();
        let map = DipoleMap::new(base, vec![d]).unwrap();
        assert_eq!(map.numerator_degree(), 3);

        assert!(matches!(
            Dipole::new(c(0.0, 0.0), 0.0, 0.0),
            Err(MapError::BadSeparation { .. })
        ));
    }

    #[test]
    fn build_map_rejects_collisions() {
        let base = BaseMap::power(2).unwrap();
        // Zero at the origin collides with the center of z^2.
        let d = Dipole::new(c(-0.1, 0.0), 0.2, 0.0).unwrap();
        assert_eq!(d.zero(), c(0.0, 0.0));
        assert!(matches!(
            DipoleMap::new(base, vec![d]),
            Err(MapError::DipoleCollidesWithCenter { .. })
        ));

        // The same dipole twice duplicates both its zero and its pole.
        let d1 = Dipole::new(c(1.0, 0.0), 0.2, 0.0).unwrap();
        assert_eq!(d1.zero(), c(1.1, 0.0));
        assert!(matches!(
            DipoleMap::new(base, vec![d1, d1]),
            Err(MapError::DuplicatePoint { .. })
        ));
    }

    #[test]
    fn eval_factored_form() {
        let base = BaseMap::power(2).unwrap();
        let map = DipoleMap::bare(base);
        assert_eq!(
            map.eval(SpherePoint::finite(2.0, 0.0)),
            SpherePoint::Finite(c(4.0, 0.0))
        );
        assert_eq!(map.eval(SpherePoint::Infinity), SpherePoint::Infinity);

        let d = Dipole::new(c(1.0, 0.0), 0.2, 0.0).unwrap();
        let map = DipoleMap::new(base, vec![d]).unwrap();
        // Pole maps to infinity, zero maps to the fixed center.
        assert_eq!(
            map.eval(SpherePoint::finite(0.9, 0.0)),
            SpherePoint::Infinity
        );
        assert_eq!(
            map.eval(SpherePoint::finite(1.1, 0.0)),
            SpherePoint::Finite(c(0.0, 0.0))
        );
        // Generic point agrees with the hand formula z^2 (z-1.1)/(z-0.9).
        let z = c(2.0, 0.0);
        let expect = z * z * (z - c(1.1, 0.0)) / (z - c(0.9, 0.0));
        let got = map.eval_complex(z).as_complex().unwrap();
        assert!((got - expect).norm() < 1e-14);
    }

    #[test]
    fn fixed_points_are_exact() {
        let base = BaseMap::new(3, c(2.0, 1.0), c(0.5, -0.25)).unwrap();
        let dipoles = vec![
            Dipole::new(c(1.5, 0.8), 0.05, 0.3).unwrap(),
            Dipole::new(c(-1.2, 0.4), 0.05, 1.1).unwrap(),
        ];
        let map = DipoleMap::new(base, dipoles).unwrap();
        assert_eq!(
            map.eval(SpherePoint::Finite(base.center())),
            SpherePoint::Finite(base.center())
        );
        assert_eq!(map.eval(SpherePoint::Infinity), SpherePoint::Infinity);
    }

    #[test]
    fn escape_radii_for_squaring_map() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let radii = map.escape_radii().unwrap();
        // |z^2| <= |z|/2 iff |z| <= 1/2, |z^2| >= 2|z| iff |z| >= 2.
        assert!((radii.inner - 0.5).abs() < 1e-12);
        assert!((radii.outer - 2.0).abs() < 1e-12);
    }

    #[test]
    fn escape_radii_dodge_an_inner_pole() {
        let base = BaseMap::power(2).unwrap();
        let d = Dipole::new(c(0.3, 0.0), 0.05, 0.0).unwrap();
        let map = DipoleMap::new(base, vec![d]).unwrap();
        let radii = map.escape_radii().unwrap();
        assert!(radii.inner < 0.3 - 0.025);
        // Certified contraction on a fresh sample of the inner circle.
        for k in 0..1000 {
            let z = Complex64::from_polar(radii.inner, 0.00629 * k as f64);
            let g = map.eval_complex(z).as_complex().unwrap();
            assert!(g.norm() <= radii.inner / 2.0 + 1e-15);
        }
    }

    #[test]
    fn deviation_bound_examples() {
        let d = Dipole::new(c(0.0, 0.0), 0.1, 0.0).unwrap();
        let bound = d.deviation_bound(1.0).unwrap();
        assert!((bound - 0.1 / 0.95).abs() < 1e-15);
        assert!(matches!(
            d.deviation_bound(0.05),
            Err(MapError::InsideDisk { .. })
        ));
        // The bound vanishes with the separation.
        let tiny = Dipole::new(c(0.0, 0.0), 1e-9, 0.0).unwrap();
        assert!(tiny.deviation_bound(1.0).unwrap() < 2e-9);
    }

    #[test]
    fn deviation_bound_dominates_samples() {
        let d = Dipole::new(c(0.7, -0.3), 0.1, 0.9).unwrap();
        let (a, b) = d.zero_pole();
        let bound = d.deviation_bound(1.0).unwrap();
        let mut worst = 0.0f64;
        for k in 0..10_000 {
            let z = d.center + Complex64::from_polar(1.0, 0.000629 * k as f64);
            let dev = ((z - a) / (z - b) - Complex64::new(1.0, 0.0)).norm();
            worst = worst.max(dev);
        }
        assert!(worst <= bound);
    }

    #[test]
    fn expanded_coefficients_small_cases() {
        let map = DipoleMap::bare(BaseMap::power(2).unwrap());
        let (num, den) = map.expanded_coefficients();
        assert_eq!(num, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(den, &[c(1.0, 0.0)]);

        let d = Dipole::new(c(1.0, 0.0), 0.2, 0.0).unwrap();
        let map = DipoleMap::new(BaseMap::power(2).unwrap(), vec![d]).unwrap();
        let (num, den) = map.expanded_coefficients();
        // z^2 (z - 1.1) = -1.1 z^2 + z^3
        assert!((num[0]).norm() < 1e-15);
        assert!((num[1]).norm() < 1e-15);
        assert!((num[2] - c(-1.1, 0.0)).norm() < 1e-15);
        assert!((num[3] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((den[0] - c(-0.9, 0.0)).norm() < 1e-15);
        assert!((den[1] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degree_bookkeeping() {
        let base = BaseMap::new(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let dipoles: Vec<Dipole> = (0..5)
            .map(|k| Dipole::new(c(1.2 + 0.3 * k as f64, 0.7), 0.05, 0.2 * k as f64).unwrap())
            .collect();
        let map = DipoleMap::new(base, dipoles).unwrap();
        let (num, den) = map.expanded_coefficients();
        assert_eq!(num.len() as u32, map.numerator_degree() + 1);
        assert_eq!(den.len() as u32, map.denominator_degree() + 1);
        assert!(num.last().unwrap().norm() > 0.0);
        assert!(den.last().unwrap().norm() > 0.0);
    }

    #[test]
    fn superattraction_at_the_center() {
        let base = BaseMap::new(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let dipoles = vec![Dipole::new(c(1.5, 0.5), 0.1, 0.0).unwrap()];
        let map = DipoleMap::new(base, dipoles).unwrap();
        let h = c(1e-6, 0.0);
        let g = map.eval_complex(h).as_complex().unwrap();
        assert!(g.norm() / h.norm() < 1e-3);
    }

    #[test]
    fn map_file_round_trip() {
        let base = BaseMap::new(2, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let dipoles = vec![
            Dipole::new(c(1.3, 1.5), 0.2, 0.0).unwrap(),
            Dipole::new(c(-0.4, 1.7), 0.2, 0.0).unwrap(),
        ];
        let map = DipoleMap::new(base, dipoles).unwrap();
        let file = MapFile::from_map(&map);
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"N\":2"));
        let back: MapFile = serde_json::from_str(&json).unwrap();
        let map2 = back.to_map().unwrap();
        assert_eq!(map.dipoles(), map2.dipoles());
        assert_eq!(map.base(), map2.base());
    }
}
