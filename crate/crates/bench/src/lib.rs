//! Fixed-seed instances shared by the criterion benches.

use capsndp_core::generators::{gen_random, RandomSpec, RequirementSpec};
use capsndp_core::Instance;

pub const FIXTURE_SEED: u64 = 0x5eed;

pub fn uniform(n: usize, m: usize) -> Instance {
    random(n, m, RequirementSpec::Uniform)
}

pub fn kway(n: usize, m: usize, levels: usize) -> Instance {
    random(n, m, RequirementSpec::Kway { levels })
}

pub fn pairs(n: usize, m: usize, pairs: usize) -> Instance {
    random(n, m, RequirementSpec::Pairs { pairs })
}

fn random(n: usize, m: usize, requirements: RequirementSpec) -> Instance {
    let spec = RandomSpec {
        n,
        m,
        cap: (1, 4),
        cost: (1, 10),
        requirements,
    };
    gen_random(&spec, FIXTURE_SEED).expect("fixture parameters admit a connected graph")
}
