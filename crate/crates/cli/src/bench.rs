use std::time::Instant;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigx::{corpus, CompressedIndex, Mode, PlannerConfig};

use crate::z_lg_n_over_z;

const LENGTHS: [usize; 6] = [3, 8, 16, 32, 64, 256];

fn generate(family: &str, n: usize, seed: u64) -> Result<Vec<u8>> {
    Ok(match family {
        // A fixed base, so longer texts are more copies of the same string.
        "copies" => corpus::copies_of(&corpus::random(4096, 4, seed), n.div_ceil(4096), 4, 4, seed)[..n].to_vec(),
        "random" => corpus::random(n, 4, seed),
        "english" => corpus::english_like(n, seed),
        "fibonacci" => corpus::fibonacci(n),
        "runs" => corpus::all_runs(n, 16, seed),
        _ => bail!("unknown family {family:?} (copies, random, english, fibonacci, runs)"),
    })
}

/// Writes one CSV row per (size, mode, pattern length).
pub fn run(family: &str, sizes: &[usize], queries: usize, seed: u64) -> Result<()> {
    println!(
        "family,n,z,dag_nodes,dag_edges,z_lg_n_over_z,node_ratio,mode,index_bytes,build_ms,m,queries,mean_occ,mean_query_us,filter_fp_rate"
    );
    for &n in sizes {
        if n == 0 {
            bail!("sizes must be positive");
        }
        let text = generate(family, n, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        for mode in Mode::ALL {
            let started = Instant::now();
            let index = CompressedIndex::build(&text, &PlannerConfig::default().with_seed(seed).with_mode(mode))?;
            let build_ms = started.elapsed().as_secs_f64() * 1e3;
            let s = index.stats();
            let bytes: usize = s.sections.iter().map(|(_, b)| b).sum();
            let model = z_lg_n_over_z(s.n, s.z);
            let fp_rate = index.filter().map_or(String::new(), |f| {
                let absent = (0..10_000)
                    .filter(|_| {
                        let p: Vec<u8> = (0..index.l_semishort()).map(|_| rng.gen_range(128..=255)).collect();
                        f.contains(index.dag().fingerprint_fn().of(&p))
                    })
                    .count();
                format!("{:.5}", absent as f64 / 10_000.0)
            });
            for m in LENGTHS.into_iter().filter(|&m| m <= n) {
                let pats: Vec<Vec<u8>> = (0..queries)
                    .map(|_| {
                        let i = rng.gen_range(0..=n - m);
                        text[i..i + m].to_vec()
                    })
                    .collect();
                let started = Instant::now();
                let occ: usize = pats.iter().map(|p| index.locate(p).len()).sum();
                let us = started.elapsed().as_secs_f64() * 1e6 / queries.max(1) as f64;
                println!(
                    "{family},{},{},{},{},{model:.1},{:.4},{mode},{bytes},{build_ms:.1},{m},{queries},{:.2},{us:.2},{fp_rate}",
                    s.n,
                    s.z,
                    s.dag_nodes,
                    s.dag_edges,
                    s.dag_nodes as f64 / model,
                    occ as f64 / queries.max(1) as f64
                );
            }
        }
    }
    Ok(())
}
