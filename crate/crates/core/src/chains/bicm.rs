//! Uniform Gray QAM with every bit level inner-coded and a single decoding
//! stage.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{bit_errors, ChainConfig, FrameCounters, Modulation, TxFrame};
use crate::error::{Error, Result};
use crate::fec::{load_code, Interleaver, LdpcCode, MinSumDecoder};
use crate::mapping::GrayQam;

const INTERLEAVER_SALT: u64 = 0x5bd1_e995_27d4_eb2f;

#[derive(Clone, Debug)]
pub struct BicmChain {
    config: ChainConfig,
    qam: GrayQam,
    code: LdpcCode,
    interleaver: Interleaver,
    symbols: usize,
}

impl BicmChain {
    pub fn new(config: &ChainConfig, seed: u64) -> Result<Self> {
        let order = match &config.modulation {
            Modulation::Qam { order } => *order,
            other => return Err(Error::Config(format!("bicm needs a QAM modulation, got {other:?}"))),
        };
        let qam = GrayQam::square(order)?;
        let code = load_code(config.rate, config.code_length)?;
        let bps = qam.bits_per_symbol();
        if code.n() % bps != 0 {
            return Err(Error::Config(format!("code length {} is not a multiple of {bps} bits per symbol", code.n())));
        }
        let interleaver = if config.interleave {
            Interleaver::new(code.n(), seed ^ INTERLEAVER_SALT)
        } else {
            Interleaver::identity(code.n())
        };
        Ok(BicmChain { config: config.clone(), symbols: code.n() / bps, qam, code, interleaver })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn qam(&self) -> &GrayQam {
        &self.qam
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn transmit(&self, rng: &mut ChaCha8Rng) -> Result<TxFrame> {
        let info: Vec<u8> = (0..self.code.k()).map(|_| rng.random_range(0..2u8)).collect();
        let cw = self.code.encode(&info)?;
        let mut bits = vec![0u8; cw.len()];
        self.interleaver.interleave(&cw, &mut bits);
        let bps = self.qam.bits_per_symbol();
        let mut symbols = Vec::with_capacity(2 * self.symbols);
        for chunk in bits.chunks(bps) {
            let (i, q) = self.qam.map(chunk)?;
            symbols.push(i);
            symbols.push(q);
        }
        Ok(TxFrame { symbols, coded_info: info, uncoded: Vec::new(), shaper_input: Vec::new() })
    }

    pub fn receive(&self, tx: &TxFrame, y: &[f64], sigma2: f64) -> Result<FrameCounters> {
        if y.len() != 2 * self.symbols {
            return Err(Error::LengthMismatch { expected: 2 * self.symbols, got: y.len() });
        }
        let m = self.qam.bits_per_dim();
        let n = self.code.n();
        let mut llr_ch = vec![0.0; n];
        for (s, out) in llr_ch.chunks_mut(2 * m).enumerate() {
            let (lo, hi) = out.split_at_mut(m);
            self.qam.llr_dim(y[2 * s], sigma2, lo);
            self.qam.llr_dim(y[2 * s + 1], sigma2, hi);
        }
        let mut llr = vec![0.0; n];
        self.interleaver.deinterleave(&llr_ch, &mut llr);
        let mut dec = MinSumDecoder::new(&self.code);
        let outcome = dec.decode(&llr, self.config.max_iters)?;
        let info_hat = self.code.extract_info(dec.hard_decision());
        let mut c = FrameCounters {
            coded_bits: info_hat.len() as u64,
            coded_errors: bit_errors(&info_hat, &tx.coded_info),
            ldpc_failures: u64::from(!outcome.converged),
            ..FrameCounters::default()
        };
        c.finish();
        Ok(c)
    }
}
