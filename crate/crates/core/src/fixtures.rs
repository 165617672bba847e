//! Named fixtures and seeded generators for configuration corpora.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::birational::{blow_up_node, blow_up_node_pair, blow_up_smooth};
use crate::config::{BaseSpec, ConfigFile};
use crate::cycles::CycleConfig;

/// Largest cycle the generators produce.
pub const MAX_GENERATED_M: usize = 10;

/// The five reference configurations.
pub mod named {
    use crate::cycles::CycleConfig;

    /// Real, `k = 1`, `(−2, −2)`, `n = 4`: `C` is nef with `C² = 0`.
    pub fn a() -> CycleConfig {
        CycleConfig::real(&[-2], 4)
    }

    /// Real, `k = 1`, `(−3, −3)`, `n = 5`: negative definite, `P = 0`.
    pub fn b() -> CycleConfig {
        CycleConfig::real(&[-3], 5)
    }

    /// Real, `k = 2`, `(−1, −4, −1, −4)`, `n = 5`: `P = (1, ½, 1, ½)`.
    pub fn c() -> CycleConfig {
        CycleConfig::real(&[-1, -4], 5)
    }

    /// Non-real `(−3, −1, −3)`; contracting the middle curve gives A.
    pub fn d() -> CycleConfig {
        CycleConfig::new(vec![-3, -1, -3])
    }

    /// Real, `k = 2`, `(−5, 1, −5, 1)`, `n = 4`: `P² = 18/5`.
    pub fn e() -> CycleConfig {
        CycleConfig::real(&[-5, 1], 4)
    }

    pub fn all() -> Vec<(&'static str, CycleConfig)> {
        vec![("A", a()), ("B", b()), ("C", c()), ("D", d()), ("E", e())]
    }
}

/// A generated configuration file and its name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFixture {
    pub name: String,
    pub file: ConfigFile,
}

/// Deterministic corpus: random node blow-ups of the real all-(−2) 4-cycle.
///
/// Real walks blow up 0–3 conjugate node pairs; the others drop reality and
/// blow up 0–6 single nodes.
pub fn generate_fixtures(seed: u64, count: usize) -> Vec<GeneratedFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut c = CycleConfig::real(&[-2, -2], 4);
            if rng.gen_bool(0.5) {
                for _ in 0..rng.gen_range(0..=3) {
                    let node = rng.gen_range(0..c.k().expect("real walk"));
                    c = blow_up_node_pair(&c, node).expect("valid real cycle").config;
                }
            } else {
                c = c.without_reality();
                for _ in 0..rng.gen_range(0..=6) {
                    let node = rng.gen_range(0..c.m());
                    c = blow_up_node(&c, node, false).expect("valid cycle").config;
                }
            }
            GeneratedFixture {
                name: format!("gen-{seed}-{:03}", i + 1),
                file: ConfigFile::cycle(c),
            }
        })
        .collect()
}

/// Concatenated corpus text, one commented block per fixture.
pub fn render_fixtures(fixtures: &[GeneratedFixture]) -> String {
    let mut out = String::new();
    for f in fixtures {
        out.push_str(&format!("# fixture {}\n", f.name));
        out.push_str(&f.file.render());
        out.push('\n');
    }
    out
}

/// Broader non-real corpus: a small seed cycle followed by up to six random
/// node or smooth-point blow-ups, keeping `m ≤ 10`.
pub fn random_walk(rng: &mut ChaCha8Rng) -> CycleConfig {
    let seeds: [&[i64]; 5] = [&[9], &[1, 4], &[1, 1, 1], &[0, 0, 0, 0], &[0]];
    let pick = rng.gen_range(0..seeds.len() + 8);
    let mut c = if pick < seeds.len() {
        CycleConfig::new(seeds[pick].to_vec())
    } else {
        // all-(−2) cycles of length 2..=9
        CycleConfig::new(vec![-2; pick - seeds.len() + 2])
    };
    for _ in 0..rng.gen_range(0..=6) {
        if c.m() < MAX_GENERATED_M && rng.gen_bool(0.6) {
            let node = rng.gen_range(0..c.m());
            c = blow_up_node(&c, node, true).expect("valid cycle").config;
        } else {
            let i = rng.gen_range(0..c.m());
            c = blow_up_smooth(&c, i).expect("valid cycle");
        }
    }
    c
}

/// `count` configurations from [`random_walk`] under one seed.
pub fn random_corpus(seed: u64, count: usize) -> Vec<CycleConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_walk(&mut rng)).collect()
}

/// Named fixtures, the generated corpus for `seed` and a random-walk corpus.
pub fn corpus(seed: u64, generated: usize, walked: usize) -> Vec<(String, CycleConfig)> {
    let mut out: Vec<(String, CycleConfig)> = named::all().into_iter().map(|(n, c)| (n.to_string(), c)).collect();
    for g in generate_fixtures(seed, generated) {
        if let BaseSpec::Cycle(c) = g.file.base {
            out.push((g.name, c));
        }
    }
    for (i, c) in random_corpus(seed, walked).into_iter().enumerate() {
        out.push((format!("walk-{seed}-{:03}", i + 1), c));
    }
    out
}
