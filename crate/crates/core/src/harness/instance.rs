use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::Operator;
use crate::error::{Error, Result};
use crate::filtration::{AdaptedSequence, Filtration, Martingale};
use crate::random::ginibre;

use super::config::{ExperimentConfig, Family, Shape};

/// Seed of instance `id`: the first word of stream `id` of a ChaCha8
/// generator keyed by the master seed. An instance is fully reproducible
/// from this value alone.
pub fn instance_seed(master: u64, id: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(master);
    r.set_stream(id as u64);
    r.next_u64()
}

/// One random test case. `raw` holds the unprojected draws, `xi` their
/// projections `E_n(raw_n)`, `x` the martingale with differences
/// `ξ_n - E_{n-1}(ξ_n)` and `aux` an independent Ginibre operator.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: usize,
    pub seed: u64,
    pub shape: Shape,
    pub family: Family,
    pub raw: Vec<Operator>,
    pub xi: AdaptedSequence,
    pub x: Martingale,
    pub aux: Operator,
}

impl Instance {
    pub fn for_config(config: &ExperimentConfig, id: usize) -> Result<Self> {
        let seed = instance_seed(config.seed, id);
        Self::generate(id, seed, config.shape_of(id), config.family_of(id))
    }

    pub fn generate(id: usize, seed: u64, shape: &Shape, family: Family) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Arc::new(shape.build(&mut rng)?);
        let (raw, terms) = draw_terms(&f, family, &mut rng)?;
        let xi = AdaptedSequence::new(f.clone(), terms)?;
        let x = stein_map(&f, xi.terms())?;
        let aux = ginibre(f.dim(), 1.0 / (f.dim() as f64).sqrt(), &mut rng);
        Ok(Self {
            id,
            seed,
            shape: shape.clone(),
            family,
            raw,
            xi,
            x,
            aux,
        })
    }

    pub fn filtration(&self) -> &Arc<Filtration> {
        self.xi.filtration()
    }
}

fn draw_terms<R: Rng + ?Sized>(f: &Filtration, family: Family, rng: &mut R) -> Result<(Vec<Operator>, Vec<Operator>)> {
    let d = f.dim();
    let s = 1.0 / (d as f64).sqrt();
    let mut raw = Vec::with_capacity(f.len());
    let mut terms = Vec::with_capacity(f.len());
    for n in 1..=f.len() {
        let g = match family {
            Family::Ginibre | Family::RankDeficient => ginibre(d, s, rng),
            Family::NearCommuting => {
                let diag: Vec<f64> = (0..d).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect();
                &Operator::from_real_diagonal(&diag) + &ginibre(d, 1e-3 * s, rng)
            }
        };
        let mut t = f.cond_expect(n, &g)?;
        if family == Family::RankDeficient {
            let h = f.cond_expect(n, &ginibre(d, 1.0, rng))?;
            let proj = h.spectrum().apply(|v| if v > 0.0 { 1.0 } else { 0.0 });
            t = f.cond_expect(n, &(&t * &proj))?;
            if rng.random::<f64>() < 0.25 {
                t = Operator::zeros(d);
            }
        }
        raw.push(g);
        terms.push(t);
    }
    Ok((raw, terms))
}

/// `Θ(a)_n = E_n(a_n) - E_{n-1}(a_n)`, with `Θ(a)_1 = E_1(a_1)`. Sequences
/// shorter than the filtration are padded with zeros.
pub fn stein_map(f: &Arc<Filtration>, a: &[Operator]) -> Result<Martingale> {
    if a.len() > f.len() {
        return Err(Error::LengthMismatch {
            expected: f.len(),
            got: a.len(),
        });
    }
    let mut diffs = Vec::with_capacity(f.len());
    for (i, an) in a.iter().enumerate() {
        let n = i + 1;
        let en = f.cond_expect(n, an)?;
        let d = if n == 1 { en } else { &en - &f.cond_expect(n - 1, an)? };
        diffs.push(d);
    }
    diffs.resize(f.len(), Operator::zeros(f.dim()));
    Martingale::from_differences(f.clone(), diffs)
}

/// Differences `ε_n dx_n` for signs `ε_n = ±1`.
pub fn martingale_transform(x: &Martingale, signs: &[f64]) -> Result<Martingale> {
    if signs.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: signs.len(),
        });
    }
    if let Some(s) = signs.iter().find(|s| s.abs() != 1.0) {
        return Err(Error::ParameterRange(format!("transform signs must be ±1, got {s}")));
    }
    let diffs = x.differences().iter().zip(signs).map(|(d, s)| d.scale(*s)).collect();
    Martingale::from_differences(x.filtration().clone(), diffs)
}

/// Dyadic double-or-nothing martingale on `D = 2^levels` points:
/// `x_n = 2^n 1_{A_n}` where `A_n` is the first block of the `n`-th level.
pub fn double_or_nothing(levels: usize) -> Result<Martingale> {
    if levels == 0 || levels > 10 {
        return Err(Error::ParameterRange(format!("levels must be in 1..=10, got {levels}")));
    }
    let dim = 1usize << levels;
    let f = Arc::new(Filtration::dyadic(dim)?);
    let indicator = |n: usize| -> Vec<f64> {
        let block = dim >> n;
        (0..dim).map(|i| if i < block { (1u64 << n) as f64 } else { 0.0 }).collect()
    };
    let mut prev = vec![0.0; dim];
    let mut diffs = Vec::with_capacity(levels);
    for n in 1..=levels {
        let cur = indicator(n);
        let d: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| a - b).collect();
        diffs.push(Operator::from_real_diagonal(&d));
        prev = cur;
    }
    Martingale::from_differences(f, diffs)
}
