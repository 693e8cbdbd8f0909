//! Weight functions, their Hamilton derivatives and the sampled checks around them.

pub mod assembly;
pub mod cutoff;
pub mod jet;
pub mod lemmas;
pub mod sampling;
pub mod search;

pub use assembly::{LowerWeight, WeightAssembly, WeightParams};
pub use cutoff::Cutoff;
pub use jet::Jet;
pub use lemmas::{lambda_scaling, lemma_region, lemma_sampler, Lemma, LemmaReport, ScalingReport};
pub use sampling::SampleRegion;
pub use search::{constant_search, SearchConfig, SearchOutcome, SearchReport};
