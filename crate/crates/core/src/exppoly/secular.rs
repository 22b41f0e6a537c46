use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;

use super::{CleanupReport, ExpPoly, ExpPolyError, LengthBasis, PolyInK};
use crate::graph::OneVertexModel;
use crate::secular::stabilized_pattern;

pub const DEFAULT_SYMBOLIC_CAP: usize = 18;

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicConfig {
    /// Largest `2N + M` accepted.
    pub cap: usize,
    /// Terms with coefficient norm below `vanishing * max` are dropped.
    pub vanishing: f64,
    /// A warning is raised when a dropped piece is within this factor of the threshold.
    pub fragility_factor: f64,
    /// Upper bound on the number of partial minors kept at any row.
    pub max_states: usize,
}

impl Default for SymbolicConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SYMBOLIC_CAP,
            vanishing: 1e-9,
            fragility_factor: 1e3,
            max_states: 4_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecularExpansion {
    pub poly: ExpPoly,
    pub cleanup: CleanupReport,
    pub warnings: Vec<String>,
    /// Largest number of partial minors held during the expansion.
    pub peak_states: usize,
}

/// Symbolic secular function with the default configuration.
pub fn secular_exppoly(model: &OneVertexModel) -> Result<ExpPoly, ExpPolyError> {
    secular_exppoly_with(model, &SymbolicConfig::default()).map(|e| e.poly)
}

/// Partial minor: exponent (in units of `1/denominator`) to coefficient vector.
type Acc = Vec<(i64, Vec<Complex64>)>;

/// `(exponent shift, c0, c1)`.
type Term = (i64, Complex64, Complex64);

fn accumulate(target: &mut Acc, src: &Acc, terms: &[Term], negate: bool) {
    for &(ds, c0, c1) in terms {
        let (c0, c1) = if negate { (-c0, -c1) } else { (c0, c1) };
        for (s, p) in src {
            let key = s + ds;
            let idx = match target.binary_search_by_key(&key, |e| e.0) {
                Ok(i) => i,
                Err(i) => {
                    target.insert(i, (key, Vec::new()));
                    i
                }
            };
            let dst = &mut target[idx].1;
            if dst.len() < p.len() + 1 {
                dst.resize(p.len() + 1, Complex64::zero());
            }
            for (pow, a) in p.iter().enumerate() {
                dst[pow] += a * c0;
                dst[pow + 1] += a * c1;
            }
        }
    }
}

/// Determinant of the resonance matrix as an exponential polynomial, by a
/// row-by-row Laplace expansion over subsets of used columns.
pub fn secular_exppoly_with(
    model: &OneVertexModel,
    config: &SymbolicConfig,
) -> Result<SecularExpansion, ExpPolyError> {
    let n = model.dim();
    if n > config.cap || n > 63 {
        return Err(ExpPolyError::TooLargeForSymbolic {
            size: n,
            cap: config.cap.min(63),
        });
    }
    let lengths = model.exact_lengths().ok_or(ExpPolyError::IrrationalLengths)?;
    let denom = lengths.iter().fold(1i64, |acc, l| acc.lcm(l.denom()));
    let units: Vec<i64> = lengths.iter().map(|l| l.numer() * (denom / l.denom())).collect();

    let pattern = stabilized_pattern(model);
    let entry_terms = |r: usize, c: usize| -> Vec<Term> {
        pattern.entries[r][c]
            .iter()
            .map(|t| {
                let ds = t.shift.map_or(0, |(e, s)| s as i64 * units[e]);
                (ds, t.c0, t.c1)
            })
            .collect()
    };

    // Rows vertex by vertex keep the set of half-used columns small.
    let perm = model.permutation();
    let row_order: Vec<usize> = {
        let mut inv = vec![0; n];
        for (c, &p) in perm.iter().enumerate() {
            inv[p] = c;
        }
        inv
    };
    let order_sign_negative = permutation_parity(&row_order);

    let nonzero: Vec<Vec<usize>> = row_order
        .iter()
        .map(|&r| (0..n).filter(|&c| !pattern.entries[r][c].is_empty()).collect())
        .collect();
    let mut last_row = vec![None; n];
    for (step, cols) in nonzero.iter().enumerate() {
        for &c in cols {
            last_row[c] = Some(step);
        }
    }
    if last_row.iter().any(|l| l.is_none()) {
        return Err(ExpPolyError::DegenerateSecularFunction);
    }
    let mut required = vec![0u64; n];
    for (c, l) in last_row.iter().enumerate() {
        for req in required.iter_mut().skip(l.unwrap()) {
            *req |= 1 << c;
        }
    }

    let mut states: BTreeMap<u64, Acc> = BTreeMap::new();
    states.insert(0, vec![(0, vec![Complex64::new(1.0, 0.0)])]);
    let mut peak = 1;
    for (step, &r) in row_order.iter().enumerate() {
        let terms: Vec<(usize, Vec<Term>)> = nonzero[step]
            .iter()
            .map(|&c| (c, entry_terms(r, c)))
            .collect();
        let mut next: BTreeMap<u64, Acc> = BTreeMap::new();
        for (mask, acc) in &states {
            for (c, t) in &terms {
                let bit = 1u64 << c;
                if mask & bit != 0 {
                    continue;
                }
                let new_mask = mask | bit;
                if new_mask & required[step] != required[step] {
                    continue;
                }
                let negate = (mask >> (c + 1)).count_ones() % 2 == 1;
                accumulate(next.entry(new_mask).or_default(), acc, t, negate);
            }
        }
        if next.len() > config.max_states {
            return Err(ExpPolyError::StateBudget { states: next.len() });
        }
        peak = peak.max(next.len());
        states = next;
    }

    let full = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let acc = states.remove(&full).unwrap_or_default();
    let sign = if order_sign_negative { -1.0 } else { 1.0 };
    let mut poly = ExpPoly::from_terms(acc.into_iter().map(|(s, coeffs)| {
        (
            Rational64::new(s, denom),
            PolyInK::new(coeffs.into_iter().map(|c| c * sign).collect()),
        )
    }))
    .with_basis(LengthBasis(lengths));

    let cleanup = poly.cleanup(config.vanishing);
    let mut warnings = Vec::new();
    if cleanup.largest_dropped > 0.0
        && cleanup.largest_dropped * config.fragility_factor >= cleanup.threshold
    {
        warnings.push(format!(
            "a dropped coefficient of size {:.3e} is within a factor {} of the vanishing \
             threshold {:.3e}; the classification may be fragile",
            cleanup.largest_dropped, config.fragility_factor, cleanup.threshold
        ));
    }
    if poly.is_empty() {
        return Err(ExpPolyError::DegenerateSecularFunction);
    }
    Ok(SecularExpansion {
        poly,
        cleanup,
        warnings,
        peak_states: peak,
    })
}

fn permutation_parity(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut odd = false;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// All sums `sum_j eps_j l_j` with `eps_j` in `{-1, 0, 1}`.
pub fn sigma_lattice(lengths: &[Rational64]) -> BTreeSet<Rational64> {
    let mut set = BTreeSet::from([Rational64::zero()]);
    for l in lengths {
        set = set
            .iter()
            .flat_map(|s| [s - l, *s, s + l])
            .collect();
    }
    set
}
