//! DC grid with one broadcasting generator and addressable loads.
//!
//! The generator holds the bus at `v_dc` and superimposes the scheduled
//! frames. Every load runs its own receiver on the impaired bus voltage and
//! draws its commanded current for the commanded time once a CRC-clean
//! message for its address arrives; otherwise it draws its idle current.

mod controller;
mod run;
mod scenario;

pub use controller::{Activation, LoadController};
pub use run::{
    packet_energy, run_scenario, Detection, FrameCheck, LoadFrame, ReceiverCheck, ScenarioSummary, ScenarioTrace,
};
pub use scenario::{GridScenario, LoadSpec, TxEntry};
