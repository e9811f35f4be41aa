use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigx::oracle::naive_search;
use sigx::{CompressedIndex, Mode, PlannerConfig};

/// Random patterns: substrings of assorted lengths, some with one symbol
/// changed so that many are absent.
fn draw(text: &[u8], trials: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = text.len();
    (0..trials)
        .map(|_| {
            let m = match rng.gen_range(0..10) {
                0..=5 => rng.gen_range(1..=16),
                6..=8 => rng.gen_range(17..=128),
                _ => rng.gen_range(129..=1024),
            }
            .min(n);
            let i = rng.gen_range(0..=n - m);
            let mut p = text[i..i + m].to_vec();
            if rng.gen_bool(0.2) {
                let k = rng.gen_range(0..m);
                p[k] = p[k].wrapping_add(1);
            }
            p
        })
        .collect()
}

/// Prints one line per index checked and returns whether all agreed with
/// the naive scan.
pub fn run(loaded: &CompressedIndex, text: &[u8], trials: usize, seed: u64) -> Result<bool> {
    if loaded.len() != text.len() {
        bail!("index covers {} symbols but the text has {}", loaded.len(), text.len());
    }
    if loaded.extract(1, text.len())? != text {
        println!("selftest extraction FAIL");
        return Ok(false);
    }
    let stats = loaded.stats();
    let mut candidates = vec![(format!("loaded-{}", loaded.mode()), loaded.clone())];
    for mode in Mode::ALL {
        let config = PlannerConfig { mode, epsilon: stats.epsilon, seed, ..PlannerConfig::default() };
        candidates.push((format!("fresh-{mode}"), CompressedIndex::build(text, &config)?));
    }
    let patterns = draw(text, trials, seed);
    let want: Vec<Vec<usize>> = patterns.iter().map(|p| naive_search(text, p)).collect();
    let mut all_ok = true;
    for (name, index) in &candidates {
        let failures = patterns.iter().zip(&want).filter(|(p, w)| index.locate(p) != **w).count();
        all_ok &= failures == 0;
        println!("selftest {name} trials={trials} failures={failures} {}", if failures == 0 { "PASS" } else { "FAIL" });
    }
    println!("selftest {}", if all_ok { "PASS" } else { "FAIL" });
    Ok(all_ok)
}
