//! Network-on-chip model: topology generation, shortest-path routing and a
//! cycle-level simulation of the routers that carry extrinsic values between
//! processing elements.

mod engine;
mod routing;
mod topology;

pub use engine::{run_exchange, ArbPolicy, Delivery, ExchangeOutcome, NocConfig, NocStats, Packet};
pub use routing::{build_routing_table, RoutingTable};
pub use topology::{gen_topology, NocKind, Topology};
