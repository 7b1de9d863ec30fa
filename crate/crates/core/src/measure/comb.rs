//! Purely atomic measures given by a lazily enumerated sequence of point masses.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Atom, Endpoints, WindowStats};
use crate::error::{invalid, Error, Result};
use crate::sum::NeumaierSum;

/// Index beyond which enumeration of an infinite comb is abandoned.
const MAX_INDEX: u64 = 10_000_000;

/// Built-in atomic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinComb {
    /// Atoms at `4^n` (weight `4^-n`) and `-2^(2n-1)` (weight `2^-(2n-1)`).
    Ex1,
    /// Atoms at `±2^n`, weight `2^-(n+1)` each.
    Ex2,
    /// Atoms at `3^n` (raw weight `2^(n-1)/3^(n+1)`) and `-3^n` (raw weight `2^(n-2)/3^(n+1)`).
    Ex4,
    /// Atoms at `3^n + 1/n` (raw weight `2^n/(3^n + 1/n)`) and `-3^n` (raw weight `2^(n-1)/3^n`).
    Ex5,
}

impl BuiltinComb {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinComb::Ex1 => "comb_ex1",
            BuiltinComb::Ex2 => "comb_ex2",
            BuiltinComb::Ex4 => "comb_ex4",
            BuiltinComb::Ex5 => "comb_ex5",
        }
    }

    fn raw_atoms(self, n: u64) -> [Atom; 2] {
        let k = n as i32;
        match self {
            BuiltinComb::Ex1 => [
                Atom::raw(4f64.powi(k), 4f64.powi(-k)),
                Atom::raw(-(2f64.powi(2 * k - 1)), 2f64.powi(-(2 * k - 1))),
            ],
            BuiltinComb::Ex2 => {
                let w = 2f64.powi(-(k + 1));
                let z = 2f64.powi(k);
                [Atom::raw(z, w), Atom::raw(-z, w)]
            }
            BuiltinComb::Ex4 => {
                let d = 3f64.powi(k + 1);
                let z = 3f64.powi(k);
                [Atom::raw(z, 2f64.powi(k - 1) / d), Atom::raw(-z, 2f64.powi(k - 2) / d)]
            }
            BuiltinComb::Ex5 => {
                let z = 3f64.powi(k);
                let zp = z + 1.0 / n as f64;
                [Atom::raw(zp, 2f64.powi(k) / zp), Atom::raw(-z, 2f64.powi(k - 1) / z)]
            }
        }
    }

    /// Upper bound on the raw weight carried by indices `> n`.
    fn raw_tail_bound(self, n: u64) -> f64 {
        let k = n.min(i32::MAX as u64) as i32;
        match self {
            BuiltinComb::Ex1 => 4f64.powi(-k),
            BuiltinComb::Ex2 => 2f64.powi(-k),
            BuiltinComb::Ex4 => 0.5 * (2.0f64 / 3.0).powi(k),
            BuiltinComb::Ex5 => 3.0 * (2.0f64 / 3.0).powi(k),
        }
    }
}

pub type AtomGenerator = Arc<dyn Fn(u64) -> Vec<Atom> + Send + Sync>;
pub type TailBound = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// Caller-supplied comb.
///
/// `generator(n)` yields the atoms with index `n ≥ 1`. The smallest `|location|` among
/// the atoms of index `n` must be nondecreasing in `n`, which is what lets window
/// sums stop once the enumeration has left the window.
#[derive(Clone)]
pub struct CustomComb {
    pub name: String,
    pub generator: AtomGenerator,
    pub tail_mass_bound: TailBound,
}

impl fmt::Debug for CustomComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomComb").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum CombFamily {
    Builtin(BuiltinComb),
    /// Atoms at `n = 1, 2, ...` with weight `n^-exponent / ζ(exponent)`.
    PowerLaw {
        exponent: f64,
        zeta: f64,
    },
    /// Finitely many atoms, sorted by location.
    Finite(Arc<[Atom]>),
    Custom(CustomComb),
}

/// A purely atomic probability measure.
#[derive(Debug, Clone)]
pub struct AtomicComb {
    family: CombFamily,
    normalizer: f64,
    mass_tol: f64,
}

pub const DEFAULT_MASS_TOL: f64 = 1e-9;

impl AtomicComb {
    /// One of the built-in counterexample combs, normalized to total mass one.
    pub fn builtin(which: BuiltinComb) -> Self {
        normalize_comb(CombFamily::Builtin(which), DEFAULT_MASS_TOL).expect("built-in combs have geometric tails")
    }

    /// Atoms at the positive integers with weights proportional to `n^-exponent`.
    pub fn power_law(exponent: f64) -> Result<Self> {
        if !(exponent > 1.0) || !exponent.is_finite() {
            return Err(Error::Construction(format!(
                "power-law comb needs exponent > 1, got {exponent}"
            )));
        }
        let zeta = zeta(exponent);
        Ok(Self {
            family: CombFamily::PowerLaw { exponent, zeta },
            normalizer: 1.0,
            mass_tol: DEFAULT_MASS_TOL,
        })
    }

    /// Finite atom list. Atoms with equal location are merged; weights must sum to one.
    pub fn finite(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Construction("finite comb needs at least one atom".into()));
        }
        let mut atoms = atoms;
        for a in &atoms {
            a.validate()?;
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.location == a.location => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        let total: f64 = merged.iter().map(|a| a.weight).collect::<NeumaierSum>().value();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Construction(format!(
                "finite comb weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            family: CombFamily::Finite(merged.into()),
            normalizer: 1.0,
            mass_tol: DEFAULT_MASS_TOL,
        })
    }

    pub fn custom(comb: CustomComb, mass_tol: f64) -> Result<Self> {
        normalize_comb(CombFamily::Custom(comb), mass_tol)
    }

    pub fn family(&self) -> &CombFamily {
        &self.family
    }

    /// The constant `K` multiplying the raw weights.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn mass_tol(&self) -> f64 {
        self.mass_tol
    }

    pub fn name(&self) -> String {
        match &self.family {
            CombFamily::Builtin(b) => b.name().to_string(),
            CombFamily::PowerLaw { exponent, .. } => format!("power_law({exponent})"),
            CombFamily::Finite(a) => format!("finite({} atoms)", a.len()),
            CombFamily::Custom(c) => c.name.clone(),
        }
    }

    /// Atoms of index `n` (empty past the end of a finite comb).
    pub fn atoms_at(&self, n: u64) -> Vec<Atom> {
        match &self.family {
            CombFamily::Builtin(b) => b
                .raw_atoms(n)
                .into_iter()
                .map(|a| Atom::raw(a.location, a.weight * self.normalizer))
                .collect(),
            CombFamily::PowerLaw { exponent, zeta } => {
                vec![Atom::raw(n as f64, (n as f64).powf(-exponent) / zeta)]
            }
            CombFamily::Finite(atoms) => match n.checked_sub(1).and_then(|i| atoms.get(i as usize)) {
                Some(a) => vec![*a],
                None => Vec::new(),
            },
            CombFamily::Custom(c) => (c.generator)(n)
                .into_iter()
                .map(|a| Atom::raw(a.location, a.weight * self.normalizer))
                .collect(),
        }
    }

    /// Upper bound on the total weight of atoms with index `> n`.
    pub fn tail_mass_bound(&self, n: u64) -> f64 {
        match &self.family {
            CombFamily::Builtin(b) => b.raw_tail_bound(n) * self.normalizer,
            CombFamily::PowerLaw { exponent, zeta } => {
                if n == 0 {
                    1.0
                } else {
                    (n as f64).powf(1.0 - exponent) / ((exponent - 1.0) * zeta)
                }
            }
            CombFamily::Finite(atoms) => atoms.iter().skip(n as usize).map(|a| a.weight).sum(),
            CombFamily::Custom(c) => (c.tail_mass_bound)(n) * self.normalizer,
        }
    }

    /// Number of indices needed before the tail weight drops below `tol`.
    pub fn index_for_tail(&self, tol: f64) -> Result<u64> {
        if let CombFamily::Finite(atoms) = &self.family {
            return Ok(atoms.len() as u64);
        }
        let mut n = 1u64;
        while self.tail_mass_bound(n) >= tol {
            n = n.checked_mul(2).ok_or_else(|| invalid("tail bound never small"))?;
            if n > MAX_INDEX {
                return Err(Error::Construction(format!(
                    "{}: tail mass bound stays above {tol} beyond index {MAX_INDEX}",
                    self.name()
                )));
            }
        }
        // binary search for the smallest such n
        let (mut lo, mut hi) = (n / 2, n);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_mass_bound(mid) < tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Total mass summed until the tail bound certifies `mass_tol / 2`.
    pub fn total_mass(&self) -> Result<f64> {
        let n = self.index_for_tail(self.mass_tol / 2.0)?;
        let mut s = NeumaierSum::new();
        if let CombFamily::PowerLaw { exponent, zeta } = self.family {
            return Ok(power_sum(exponent, n) / zeta);
        }
        for i in 1..=n {
            for a in self.atoms_at(i) {
                s.add(a.weight);
            }
        }
        Ok(s.value())
    }

    /// Visits every atom with `|location| ≤ radius`, in index order.
    fn for_each_within(&self, radius: f64, mut visit: impl FnMut(Atom)) -> Result<()> {
        if let CombFamily::Finite(atoms) = &self.family {
            atoms
                .iter()
                .filter(|a| a.location.abs() <= radius)
                .for_each(|a| visit(*a));
            return Ok(());
        }
        if !radius.is_finite() {
            // unbounded window: stop where the remaining weight is negligible
            let last = self.index_for_tail(1e-17)?;
            for n in 1..=last {
                self.atoms_at(n).into_iter().for_each(&mut visit);
            }
            return Ok(());
        }
        let mut n = 1u64;
        loop {
            let atoms = self.atoms_at(n);
            if atoms.is_empty() {
                return Ok(());
            }
            let nearest = atoms.iter().map(|a| a.location.abs()).fold(f64::INFINITY, f64::min);
            if nearest > radius {
                return Ok(());
            }
            for a in atoms {
                if a.location.abs() <= radius {
                    visit(a);
                }
            }
            n += 1;
            if n > MAX_INDEX {
                return Err(invalid(format!(
                    "{}: more than {MAX_INDEX} atoms within radius {radius}",
                    self.name()
                )));
            }
        }
    }

    pub(crate) fn window(&self, lo: f64, hi: f64, ends: Endpoints) -> Result<WindowStats> {
        if let CombFamily::PowerLaw { exponent, zeta } = self.family {
            return Ok(power_law_window(exponent, zeta, lo, hi, ends));
        }
        let radius = lo.abs().max(hi.abs());
        let mut mass = NeumaierSum::new();
        let mut moment = NeumaierSum::new();
        self.for_each_within(radius, |a| {
            if ends.contains(lo, hi, a.location) {
                mass.add(a.weight);
                moment.add(a.location * a.weight);
            }
        })?;
        Ok(WindowStats {
            mass: mass.value(),
            first_moment: moment.value(),
        })
    }

    /// `∫_{window} g dP` by direct summation over atoms.
    pub(crate) fn expect_window(&self, g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, ends: Endpoints) -> Result<f64> {
        let radius = lo.abs().max(hi.abs());
        if let CombFamily::PowerLaw { .. } = self.family {
            if radius > MAX_INDEX as f64 {
                return Err(invalid(
                    "generic expectations over a power-law comb are limited to windows of radius 1e7",
                ));
            }
        }
        let mut s = NeumaierSum::new();
        self.for_each_within(radius, |a| {
            if ends.contains(lo, hi, a.location) {
                s.add(g(a.location) * a.weight);
            }
        })?;
        Ok(s.value())
    }

    /// `P(X > t)` (or `P(X ≥ t)` when `inclusive`).
    pub(crate) fn prob_above(&self, t: f64, inclusive: bool) -> Result<f64> {
        if let CombFamily::PowerLaw { exponent, zeta } = self.family {
            let first = if inclusive { t.ceil() } else { t.floor() + 1.0 }.max(1.0);
            if !first.is_finite() {
                return Ok(0.0);
            }
            return Ok(power_tail_sum(exponent, first.min(1e18) as u64 - 1) / zeta);
        }
        self.tail_sum(t, |z| if inclusive { z >= t } else { z > t })
    }

    pub(crate) fn prob_below(&self, t: f64, inclusive: bool) -> Result<f64> {
        if let CombFamily::PowerLaw { exponent, zeta } = self.family {
            let last = if inclusive { t.floor() } else { t.ceil() - 1.0 };
            if last < 1.0 {
                return Ok(0.0);
            }
            return Ok(1.0 - power_tail_sum(exponent, last.min(1e18) as u64) / zeta);
        }
        self.tail_sum(t, |z| if inclusive { z <= t } else { z < t })
    }

    fn tail_sum(&self, t: f64, keep: impl Fn(f64) -> bool) -> Result<f64> {
        match &self.family {
            CombFamily::Finite(atoms) => Ok(atoms
                .iter()
                .filter(|a| keep(a.location))
                .map(|a| a.weight)
                .collect::<NeumaierSum>()
                .value()),
            _ => {
                let mut s = NeumaierSum::new();
                let radius = t.abs();
                let mut n = 1u64;
                loop {
                    let atoms = self.atoms_at(n);
                    if atoms.is_empty() {
                        break;
                    }
                    for a in &atoms {
                        if keep(a.location) {
                            s.add(a.weight);
                        }
                    }
                    let nearest = atoms.iter().map(|a| a.location.abs()).fold(f64::INFINITY, f64::min);
                    let bound = self.tail_mass_bound(n);
                    if nearest > radius && (bound <= 1e-17 * s.value() || bound < 1e-300) {
                        break;
                    }
                    n += 1;
                    if n > MAX_INDEX {
                        return Err(invalid(format!("{}: tail sum did not settle", self.name())));
                    }
                }
                Ok(s.value())
            }
        }
    }

    /// Locations of atoms with `|location| ≤ radius`, or `None` if there are more than `cap`.
    pub(crate) fn locations_within(&self, radius: f64, cap: usize) -> Option<Vec<f64>> {
        if let CombFamily::PowerLaw { .. } = self.family {
            if radius >= cap as f64 {
                return None;
            }
        }
        let mut out = Vec::new();
        let mut overflow = false;
        let ok = self.for_each_within(radius, |a| {
            if out.len() >= cap {
                overflow = true;
            } else {
                out.push(a.location);
            }
        });
        if ok.is_err() || overflow {
            None
        } else {
            Some(out)
        }
    }
}

/// Sets the normalizer `K` so the comb has total mass one.
///
/// Families whose raw weights already sum to one within `mass_tol` keep `K = 1`
/// exactly, so products `location × weight` stay exact where they were.
pub fn normalize_comb(family: CombFamily, mass_tol: f64) -> Result<AtomicComb> {
    if !(mass_tol > 0.0) {
        return Err(invalid("mass_tol must be positive"));
    }
    let raw = AtomicComb {
        family,
        normalizer: 1.0,
        mass_tol,
    };
    match &raw.family {
        CombFamily::PowerLaw { .. } | CombFamily::Finite(_) => return Ok(raw),
        _ => {}
    }
    let n = raw
        .index_for_tail(1e-17)
        .map_err(|e| Error::Construction(format!("raw weights are not summable with a usable tail bound: {e}")))?;
    let mut total = NeumaierSum::new();
    for i in 1..=n {
        for a in raw.atoms_at(i) {
            if !(a.weight > 0.0) || !a.location.is_finite() {
                return Err(Error::Construction(format!(
                    "{}: atom {i} has invalid weight {} or location {}",
                    raw.name(),
                    a.weight,
                    a.location
                )));
            }
            total.add(a.weight);
        }
    }
    let total = total.value();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Construction(format!("{}: raw mass {total}", raw.name())));
    }
    let normalizer = if (total - 1.0).abs() <= mass_tol {
        1.0
    } else {
        1.0 / total
    };
    Ok(AtomicComb { normalizer, ..raw })
}

fn power_law_window(exponent: f64, zeta: f64, lo: f64, hi: f64, ends: Endpoints) -> WindowStats {
    // integer range [first, last] inside the window
    let mut first = lo.ceil().max(1.0);
    if !ends.lo_closed && first == lo {
        first += 1.0;
    }
    let mut last = hi.floor();
    if !ends.hi_closed && last == hi {
        last -= 1.0;
    }
    if last < first {
        return WindowStats::default();
    }
    let first = first as u64;
    let last = last.min(1e18) as u64;
    let range = |s: f64| power_sum(s, last) - power_sum(s, first - 1);
    WindowStats {
        mass: range(exponent) / zeta,
        first_moment: range(exponent - 1.0) / zeta,
    }
}

const DIRECT_TERMS: u64 = 2000;

fn direct_sum(s: f64, from: u64, to: u64) -> f64 {
    // smallest terms first
    (from..=to)
        .rev()
        .map(|k| (k as f64).powf(-s))
        .collect::<NeumaierSum>()
        .value()
}

/// Euler–Maclaurin estimate of `Σ_{k=a+1}^{b} k^{-s}` for `a ≥ DIRECT_TERMS`.
fn euler_maclaurin(s: f64, a: f64, b: f64) -> f64 {
    let f = |x: f64| x.powf(-s);
    let d1 = |x: f64| -s * x.powf(-s - 1.0);
    let d3 = |x: f64| -s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0);
    let d5 = |x: f64| -s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * x.powf(-s - 5.0);
    let integral = if (s - 1.0).abs() < 1e-15 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - s) - a.powf(1.0 - s)) / (1.0 - s)
    };
    integral + (f(b) - f(a)) / 2.0 + (d1(b) - d1(a)) / 12.0 - (d3(b) - d3(a)) / 720.0 + (d5(b) - d5(a)) / 30240.0
}

/// `Σ_{k=1}^{n} k^{-s}`.
pub(crate) fn power_sum(s: f64, n: u64) -> f64 {
    if n <= DIRECT_TERMS {
        direct_sum(s, 1, n)
    } else {
        direct_sum(s, 1, DIRECT_TERMS) + euler_maclaurin(s, DIRECT_TERMS as f64, n as f64)
    }
}

/// `Σ_{k>n} k^{-s}` for `s > 1`.
pub(crate) fn power_tail_sum(s: f64, n: u64) -> f64 {
    let asymptotic = |a: f64| {
        let f = a.powf(-s);
        let d1 = -s * a.powf(-s - 1.0);
        let d3 = -s * (s + 1.0) * (s + 2.0) * a.powf(-s - 3.0);
        let d5 = -s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * a.powf(-s - 5.0);
        a.powf(1.0 - s) / (s - 1.0) - f / 2.0 - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0
    };
    if n >= DIRECT_TERMS {
        asymptotic(n as f64)
    } else {
        direct_sum(s, n + 1, DIRECT_TERMS) + asymptotic(DIRECT_TERMS as f64)
    }
}

/// Riemann zeta function for real `s > 1`.
pub fn zeta(s: f64) -> f64 {
    power_sum(s, DIRECT_TERMS) + power_tail_sum(s, DIRECT_TERMS)
}
