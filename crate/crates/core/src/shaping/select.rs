//! Parameter selection: the lowest-energy CCDM type and the smallest ESS
//! energy bound that still index 2^L sequences.

use num_bigint::BigUint;
use num_traits::One;

use super::ess::{last_row, unit_energy};
use super::{amplitude, Composition};
use crate::error::{Error, Result};

/// Smallest E_max with at least 2^l admissible length-n sequences.
pub fn select_emax(alphabet: usize, n: usize, l: usize) -> Result<u64> {
    check_rate(alphabet, n, l)?;
    let target = BigUint::one() << l;
    let b_cap = n * unit_energy(alphabet - 1);
    let mut b_max = n.min(b_cap).max(1);
    loop {
        let row = last_row(alphabet, n, b_max);
        if let Some(b) = row.iter().position(|c| c >= &target) {
            return Ok(n as u64 + 8 * b as u64);
        }
        if b_max >= b_cap {
            // the full cube has |A|^n ≥ 2^l sequences, so this is unreachable
            return Err(Error::Infeasible(format!("no energy bound gives 2^{l} sequences")));
        }
        b_max = (2 * b_max).min(b_cap);
    }
}

/// Lowest-energy composition of blocklength `n` carrying round(n·rs) bits.
pub fn select_composition(alphabet: usize, n: usize, rs: f64) -> Result<Composition> {
    if !(rs >= 0.0) {
        return Err(Error::Infeasible(format!("shaping rate {rs} is negative")));
    }
    select_composition_bits(alphabet, n, (n as f64 * rs).round() as usize)
}

fn check_rate(alphabet: usize, n: usize, l: usize) -> Result<()> {
    if alphabet == 0 || n == 0 {
        return Err(Error::Infeasible("empty alphabet or blocklength".into()));
    }
    if l as f64 > n as f64 * (alphabet as f64).log2() + 1e-9 {
        return Err(Error::Infeasible(format!(
            "{l} bits exceed n·log2|A| = {:.3}",
            n as f64 * (alphabet as f64).log2()
        )));
    }
    Ok(())
}

struct Search {
    log2_fact: Vec<f64>,
    n: usize,
    l: usize,
}

impl Search {
    fn log2_multinomial(&self, counts: &[usize]) -> f64 {
        self.log2_fact[self.n] - counts.iter().map(|&c| self.log2_fact[c]).sum::<f64>()
    }

    /// Feasible with a small f64 margin; the winner is re-checked exactly.
    fn feasible(&self, counts: &[usize]) -> bool {
        self.log2_multinomial(counts) >= self.l as f64 - 1e-7
    }
}

fn energy(counts: &[usize]) -> u64 {
    counts.iter().enumerate().map(|(j, &c)| c as u64 * u64::from(amplitude(j)).pow(2)).sum()
}

/// Largest-remainder quantization of n·p.
fn quantize(p: &[f64], n: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = p.iter().map(|&x| (x * n as f64).floor() as usize).collect();
    let short = n - counts.iter().sum::<usize>();
    let mut rem: Vec<(f64, usize)> = p.iter().enumerate().map(|(j, &x)| (x * n as f64 - counts[j] as f64, j)).collect();
    // ties go to the smaller amplitude
    rem.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, j) in rem.iter().take(short) {
        counts[j] += 1;
    }
    counts
}

fn maxwell_boltzmann(alphabet: usize, lambda: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..alphabet).map(|j| (-lambda * f64::from(amplitude(j)).powi(2)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

pub(crate) fn select_composition_bits(alphabet: usize, n: usize, l: usize) -> Result<Composition> {
    check_rate(alphabet, n, l)?;
    let mut log2_fact = vec![0.0; n + 1];
    for i in 1..=n {
        log2_fact[i] = log2_fact[i - 1] + (i as f64).log2();
    }
    let s = Search { log2_fact, n, l };

    let mut candidates: Vec<Vec<usize>> = Vec::new();
    candidates.push(quantize(&vec![1.0 / alphabet as f64; alphabet], n));
    for i in 0..=600 {
        let lambda = 1e-5 * 10f64.powf(i as f64 / 100.0);
        candidates.push(quantize(&maxwell_boltzmann(alphabet, lambda), n));
    }
    let mut all_low = vec![0; alphabet];
    all_low[0] = n;
    candidates.push(all_low);

    candidates.retain(|c| s.feasible(c));
    candidates.sort_by_key(|c| energy(c));
    candidates.dedup();
    let mut refined: Vec<Vec<usize>> = candidates.into_iter().take(8).map(|c| refine(&s, c)).collect();
    refined.sort_by_key(|c| (energy(c), std::cmp::Reverse(c.clone())));
    for c in refined {
        if let Ok(comp) = Composition::new(c, l) {
            return Ok(comp);
        }
    }
    Err(Error::Infeasible(format!("no composition of length {n} carries {l} bits")))
}

/// Greedy descent over single moves and pairs of moves, keeping feasibility.
fn refine(s: &Search, mut counts: Vec<usize>) -> Vec<usize> {
    let k = counts.len();
    let moves: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let delta = |a: usize, b: usize| i64::from(amplitude(b)).pow(2) - i64::from(amplitude(a)).pow(2);
    loop {
        let mut best: Option<(i64, f64, Vec<usize>)> = None;
        let mut consider = |cand: Vec<usize>, gain: i64| {
            if gain >= 0 || !s.feasible(&cand) {
                return;
            }
            let slack = s.log2_multinomial(&cand);
            let better = match &best {
                None => true,
                Some((g, sl, _)) => gain < *g || (gain == *g && slack > *sl),
            };
            if better {
                best = Some((gain, slack, cand));
            }
        };
        for &(a, b) in &moves {
            if counts[a] == 0 {
                continue;
            }
            let mut c = counts.clone();
            c[a] -= 1;
            c[b] += 1;
            let g1 = delta(a, b);
            consider(c.clone(), g1);
            for &(x, y) in &moves {
                if c[x] == 0 || (x, y) == (b, a) {
                    continue;
                }
                let mut c2 = c.clone();
                c2[x] -= 1;
                c2[y] += 1;
                consider(c2, g1 + delta(x, y));
            }
        }
        match best {
            Some((_, _, c)) => counts = c,
            None => return counts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emax_examples() {
        assert_eq!(select_emax(2, 2, 1).unwrap(), 10);
        assert_eq!(select_emax(2, 2, 0).unwrap(), 2);
        assert!(select_emax(2, 4, 5).is_err());
    }

    #[test]
    fn composition_bits_from_rate() {
        let c = select_composition(8, 200, 1.87).unwrap();
        assert_eq!(c.l(), 374);
        assert_eq!(c.n(), 200);
        assert!(c.log2_floor() >= 374);
    }

    #[test]
    fn tight_rate_is_uniform() {
        let c = select_composition_bits(4, 8, 11).unwrap();
        assert_eq!(c.counts(), &[2, 2, 2, 2]);
    }
}
