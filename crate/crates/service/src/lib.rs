//! Session service: the requirements workflow as a persistent state
//! machine behind a small JSON HTTP API.

pub mod error;
pub mod http;
pub mod session;
pub mod store;

pub use error::ServiceError;
pub use http::{router, serve};
pub use session::{AnswerRequest, Event, ReviseRequest, ServiceConfig, Session, SessionView, State};
pub use store::SessionStore;
