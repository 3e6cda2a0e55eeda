use super::build::{NetworkError, TransportNetwork};
use crate::scalar::Scalar;

/// Drops transport alternatives whose container cannot hold the flow's part,
/// then routes left with an empty leg. A flow without any remaining route is
/// a connectivity error.
pub fn prune_infeasible<S: Scalar>(net: &TransportNetwork<S>) -> Result<TransportNetwork<S>, NetworkError> {
    let mut out = net.clone();
    for f in &mut out.flows {
        for r in &mut f.routes {
            for h in &mut r.hops {
                h.alternatives.retain(|a| a.batch_size > 0);
            }
        }
        f.routes.retain(|r| r.hops.iter().all(|h| !h.alternatives.is_empty()));
        if f.routes.is_empty() {
            return Err(NetworkError::Unloadable {
                part: net.part(f.part).id.clone(),
                from: net.node_id(crate::model::NodeIdx::Unit(f.source)).to_string(),
                to: net.node_id(crate::model::NodeIdx::Unit(f.dest)).to_string(),
            });
        }
    }
    out.reindex();
    Ok(out)
}
