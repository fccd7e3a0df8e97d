use std::io::{self, Write};

use super::{validate_channels, ModeChannel, NormalStream, SamplerConfig};

/// Write one chain's trajectory as `step channel phi` rows, burn-in included.
/// The stream is the one [`super::sample_batches`] uses for the same chain.
pub fn write_trace<W: Write>(mut w: W, channels: &[ModeChannel], cfg: &SamplerConfig, chain: usize) -> io::Result<()> {
    let kappa_min = validate_channels(channels).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    cfg.validate().map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let dt = cfg.ds / kappa_min;
    let mut normals = NormalStream::new(cfg.seed, chain as u64);
    let mut state = channels.to_vec();
    writeln!(w, "step channel phi")?;
    for step in 0..cfg.n_steps {
        for (c, ch) in state.iter_mut().enumerate() {
            *ch = super::ou_step_exact(*ch, dt, normals.next());
            writeln!(w, "{step} {c} {:?}", ch.phi)?;
        }
    }
    Ok(())
}
