//! Seed derivation. Every random draw in a run comes from a stream derived
//! from the configured seed; nothing reads ambient entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const LAYOUT_STREAM: u64 = 0;
const AGENT_STREAM: u64 = 1;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(base ^ splitmix64(a)) ^ b)`.
///
/// Used for agent streams (`a` = stream tag, `b` = agent id) and for trial
/// seeds (`a` = a fixed tag, `b` = trial index).
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(a)) ^ b)
}

/// The random streams of one run: one for the initial layout and one per agent.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    agents: Vec<Rng>,
}

impl RngStream {
    pub fn new(seed: u64, agent_count: usize) -> Self {
        RngStream {
            seed,
            agents: (0..agent_count)
                .map(|id| Rng::seed_from_u64(derive_seed(seed, AGENT_STREAM, id as u64)))
                .collect(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator for placing objects and agents.
    pub fn layout(&self) -> Rng {
        Rng::seed_from_u64(derive_seed(self.seed, LAYOUT_STREAM, 0))
    }

    pub fn agent(&mut self, id: usize) -> &mut Rng {
        &mut self.agents[id]
    }
}
