//! One module per subcommand; each owns its clap args and its `run`.

pub mod baseline;
pub mod evaluate;
pub mod gradcheck;
pub mod sample;
pub mod split;
pub mod train;
pub mod transform;
