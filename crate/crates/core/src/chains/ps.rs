//! PS-MLC: shaped amplitudes are uncoded MRBs; one LRB per dimension (the
//! set-partition bit by default, or the sign) is the inner-coded stream, and
//! the transmitted sign follows from the LRB and the amplitude. One LDPC
//! codeword covers n real dimensions; the amplitude stream is cut into
//! ceil(n / N) shaper blocks, the last one truncated to the frame edge (its
//! deshaping is skipped, its label bits still count).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bit_errors, ChainConfig, FrameCounters, Modulation, TxFrame};
use crate::error::{Error, Result};
use crate::fec::{load_code, Interleaver, LdpcCode, MinSumDecoder};
use crate::mapping::{LrbLabel, PamConstellation};
use crate::shaping::Shaper;

/// Inputs sampled to estimate an ESS amplitude distribution.
const ESS_PRIOR_SAMPLES: usize = 10_000;
const ESS_PRIOR_SEED: u64 = 0xe55_9a1;
/// Mixed into the run seed for the LRB interleaver.
const INTERLEAVER_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Debug)]
pub struct PsMlcChain {
    config: ChainConfig,
    pam: PamConstellation,
    shaper: Shaper,
    code: LdpcCode,
    interleaver: Interleaver,
    lrb: LrbLabel,
    map_decision: bool,
}

impl PsMlcChain {
    pub fn new(config: &ChainConfig, seed: u64) -> Result<Self> {
        let (m, labeling, lrb, map_decision) = match &config.modulation {
            Modulation::Pam { bits_per_dim, labeling, lrb, map_decision } => {
                (*bits_per_dim, *labeling, *lrb, *map_decision)
            }
            other => return Err(Error::Config(format!("ps-mlc needs a PAM modulation, got {other:?}"))),
        };
        if m < 2 {
            return Err(Error::Config("ps-mlc needs at least one amplitude bit per dimension".into()));
        }
        let spec = config.shaper.as_ref().ok_or_else(|| Error::Config("ps-mlc needs a shaper".into()))?;
        let alphabet = 1usize << (m - 1);
        let shaper = match &spec.composition {
            Some(counts) => {
                if counts.len() != alphabet || counts.iter().sum::<usize>() != spec.n {
                    return Err(Error::Config(format!(
                        "composition {counts:?} does not fit {alphabet} amplitudes and N = {}",
                        spec.n
                    )));
                }
                let comp = crate::shaping::Composition::new(counts.clone(), spec.l())?;
                Shaper::Ccdm(crate::shaping::Ccdm::new(comp))
            }
            None => Shaper::build(spec.kind, alphabet, spec.n, spec.l())?,
        };
        let prior = shaper.amplitude_distribution(ESS_PRIOR_SAMPLES, ESS_PRIOR_SEED)?;
        let pam = PamConstellation::new(m, prior)?.with_labeling(labeling);
        let code = load_code(config.rate, config.code_length)?;
        let interleaver = if config.interleave {
            Interleaver::new(code.n(), seed ^ INTERLEAVER_SALT)
        } else {
            Interleaver::identity(code.n())
        };
        Ok(PsMlcChain { config: config.clone(), pam, shaper, code, interleaver, lrb, map_decision })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn pam(&self) -> &PamConstellation {
        &self.pam
    }

    pub fn shaper(&self) -> &Shaper {
        &self.shaper
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn lrb(&self) -> LrbLabel {
        self.lrb
    }

    /// Real dimensions per frame (one per LRB).
    pub fn dims(&self) -> usize {
        self.code.n()
    }

    fn amp_bits(&self) -> usize {
        self.pam.m() - 1
    }

    pub fn transmit(&self, rng: &mut ChaCha8Rng) -> Result<TxFrame> {
        let n = self.code.n();
        let big_n = self.shaper.n();
        let l = self.shaper.l();
        let info: Vec<u8> = (0..self.code.k()).map(|_| rng.random_range(0..2u8)).collect();
        let cw = self.code.encode(&info)?;
        let mut lrbs = vec![0u8; n];
        self.interleaver.interleave(&cw, &mut lrbs);

        let mut amps = Vec::with_capacity(n + big_n);
        let mut shaper_input = Vec::with_capacity(n / big_n + 1);
        while amps.len() < n {
            let bits: Vec<u8> = (0..l).map(|_| rng.random_range(0..2u8)).collect();
            let block = self.shaper.encode(&bits)?;
            if amps.len() + big_n <= n {
                shaper_input.push(bits);
            }
            amps.extend_from_slice(&block);
        }
        amps.truncate(n);

        let w = self.amp_bits();
        let mut uncoded = vec![0u8; n * w];
        let symbols: Vec<f64> = lrbs
            .iter()
            .zip(&amps)
            .zip(uncoded.chunks_mut(w))
            .map(|((&c, &a), lab)| {
                self.pam.bits_of_index(a as usize, lab);
                self.pam.map_index(self.lrb.sign_bit(c, a as usize), a as usize)
            })
            .collect();
        Ok(TxFrame { symbols, coded_info: info, uncoded, shaper_input })
    }

    pub fn receive(&self, tx: &TxFrame, y: &[f64], sigma2: f64) -> Result<FrameCounters> {
        let n = self.code.n();
        if y.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: y.len() });
        }
        // stage 1: LRB LLRs, inner soft decoding
        let llr_ch: Vec<f64> = y.iter().map(|&v| self.pam.lrb_llr(self.lrb, v, sigma2)).collect();
        let mut llr = vec![0.0; n];
        self.interleaver.deinterleave(&llr_ch, &mut llr);
        let mut dec = MinSumDecoder::new(&self.code);
        let outcome = dec.decode(&llr, self.config.max_iters)?;
        let hard = dec.hard_decision();
        let mut c = FrameCounters::default();
        let info_hat = self.code.extract_info(hard);
        c.coded_bits = info_hat.len() as u64;
        c.coded_errors = bit_errors(&info_hat, &tx.coded_info);
        c.ldpc_failures = u64::from(!outcome.converged);

        // stage 2: amplitude decisions given the decoded LRBs
        let mut lrbs = vec![0u8; n];
        self.interleaver.interleave(hard, &mut lrbs);
        let w = self.amp_bits();
        let mut amps = vec![0u8; n];
        let mut labels = vec![0u8; n * w];
        for (i, (&v, &c)) in y.iter().zip(&lrbs).enumerate() {
            let (j, _) = self.pam.decide_given_lrb(self.lrb, v, c, self.map_decision, sigma2);
            amps[i] = j as u8;
            self.pam.bits_of_index(j, &mut labels[i * w..(i + 1) * w]);
        }
        c.uncoded_bits = labels.len() as u64;
        c.uncoded_errors = bit_errors(&labels, &tx.uncoded);

        // stage 3: deshaping of every complete block
        if self.config.deshape {
            let big_n = self.shaper.n();
            for (b, truth) in tx.shaper_input.iter().enumerate() {
                c.deshaped_bits += truth.len() as u64;
                match self.shaper.decode(&amps[b * big_n..(b + 1) * big_n]) {
                    Ok(bits) => c.deshaped_errors += bit_errors(&bits, truth),
                    Err(_) => {
                        c.deshaped_errors += truth.len() as u64;
                        c.deshape_failures += 1;
                    }
                }
            }
        }
        c.finish();
        Ok(c)
    }
}
