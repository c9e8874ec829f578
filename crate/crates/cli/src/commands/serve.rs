//! The HTTP session server.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use hidden_single_core::protocol::ProtocolConfig;
use hidden_single_service::{serve, SessionStore, StoreConfig, SystemClock};

use crate::error::{CliError, Result};
use crate::Ctx;

pub fn run(ctx: &Ctx, addr: Option<String>, data: Option<PathBuf>, test_mode: bool, no_fsync: bool) -> Result<()> {
    let sc = &ctx.config.serve;
    let addr = addr.or_else(|| sc.addr.clone()).unwrap_or_else(|| "127.0.0.1:8080".into());
    let addr: SocketAddr = addr.parse().map_err(|_| CliError::Usage(format!("bad --addr {addr:?}")))?;
    let dir = data.or_else(|| sc.data.clone()).unwrap_or_else(|| PathBuf::from("data"));
    let config = StoreConfig {
        dir: dir.clone(),
        protocol: ProtocolConfig::default(),
        base_seed: ctx.seed_if_set(),
        allow_client_seed: test_mode || sc.test_mode.unwrap_or(false),
        fsync: !no_fsync && sc.fsync.unwrap_or(true),
    };
    let store = SessionStore::open(config, Arc::new(SystemClock)).map_err(|e| match e {
        hidden_single_service::StoreError::Io(io) => CliError::io(&dir, io),
        other => CliError::format(&dir, other),
    })?;
    ctx.note(&format!("{} session(s) recovered from {}; listening on {addr}", store.len(), dir.display()));
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::io(&dir, e))?;
    runtime.block_on(serve(Arc::new(store), addr)).map_err(|e| CliError::io(&dir, e))
}
