//! Ideal functionalities, composed protocols and their simulators as
//! deterministic programs.

mod commit;
mod ideal;
mod ot;
mod register;
mod simulator;
mod transcript;
mod twocc;

pub use commit::{BcRealization, DEFAULT_BC_PARAMS};
pub use ideal::{
    BitCommitment, CcDelivery, CutAndChoose, Decision, FunctionalityKind, ObliviousTransfer, Output, TwoCcPrime,
};
pub use ot::{run_ot_protocol, OtAdversary, OtInputs, ReceiverScript, SenderScript, MAX_OT_QUBITS};
pub use register::{QubitRegister, MAX_REGISTER_QUBITS};
pub use simulator::{
    run_simulator_demo, simulate_2cc_sender, CategoryStat, Corruption, DemoConfig, DemoReport, CATEGORIES,
};
pub use transcript::{AbortMarker, Event, ExecutionTranscript, Party, Scheduler};
pub use twocc::{run_2cc_protocol, TwoCcInputs, TwoCcSenderScript};
