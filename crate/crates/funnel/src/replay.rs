//! Timed replay of JSON-lines tweet streams.
//!
//! A replay reads records in input order, parses them, and hands each tweet to
//! a consumer over a bounded channel, so a slow consumer throttles the reader.
//! With `speed > 0` consecutive emissions are spaced by
//! `(created_at delta) / speed` seconds; a tweet older than its predecessor is
//! emitted at once and counted as reordered. Malformed lines are skipped and
//! counted. Each replay owns its source, so several can run side by side.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use funnel_core::RawTweet;
use log::debug;

use crate::record::{parse_line, ParseError};

/// Tweets buffered between a replay and its consumer.
pub const HANDOFF_CAPACITY: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReplayStats {
    /// Non-blank lines read.
    pub lines: u64,
    pub emitted: u64,
    pub parse_errors: u64,
    pub reordered: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("stream source failed after {} tweets: {source}", stats.emitted)]
    SourceUnreadable {
        stats: ReplayStats,
        #[source]
        source: io::Error,
    },
    #[error("replay speed must be finite and >= 0, got {0}")]
    InvalidSpeed(f64),
}

impl ReplayError {
    /// Counters up to the failure; tweets already emitted stand.
    pub fn stats(&self) -> ReplayStats {
        match self {
            ReplayError::SourceUnreadable { stats, .. } => *stats,
            ReplayError::InvalidSpeed(_) => ReplayStats::default(),
        }
    }
}

/// Reads `source` and calls `emit` for each parsed tweet, pacing by `speed`.
///
/// `on_error` sees each malformed line. Emission stops early, without error,
/// when `emit` returns false.
pub fn replay<R, E, P>(source: R, speed: f64, mut emit: E, mut on_error: P) -> Result<ReplayStats, ReplayError>
where
    R: BufRead,
    E: FnMut(RawTweet) -> bool,
    P: FnMut(u64, &ParseError),
{
    if !speed.is_finite() || speed < 0.0 {
        return Err(ReplayError::InvalidSpeed(speed));
    }
    let mut stats = ReplayStats::default();
    let mut reader = source;
    let mut buf = Vec::new();
    let mut line_no = 0u64;
    // Wall-clock deadline of the previous in-order emission and its timestamp.
    let mut clock: Option<(Instant, i64)> = None;

    loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(source) => return Err(ReplayError::SourceUnreadable { stats, source }),
        }
        line_no += 1;
        let line = match std::str::from_utf8(&buf) {
            Ok(s) => s.trim(),
            Err(_) => {
                stats.lines += 1;
                stats.parse_errors += 1;
                on_error(line_no, &ParseError::InvalidField { field: "line", reason: "not UTF-8".into() });
                continue;
            }
        };
        if line.is_empty() {
            continue;
        }
        stats.lines += 1;
        let tweet = match parse_line(line) {
            Ok(t) => t,
            Err(e) => {
                stats.parse_errors += 1;
                on_error(line_no, &e);
                continue;
            }
        };

        match clock {
            Some((_, prev)) if tweet.created_at < prev => stats.reordered += 1,
            Some((deadline, prev)) if speed > 0.0 => {
                let next = deadline + Duration::from_secs_f64((tweet.created_at - prev) as f64 / speed);
                let now = Instant::now();
                if next > now {
                    thread::sleep(next - now);
                }
                clock = Some((next, tweet.created_at));
            }
            _ => clock = Some((Instant::now(), tweet.created_at)),
        }

        stats.emitted += 1;
        if !emit(tweet) {
            break;
        }
    }
    Ok(stats)
}

/// Runs a replay on its own thread, delivering tweets in order over a bounded
/// channel. The join handle yields the final counters.
pub fn spawn_replay<R>(source: R, speed: f64) -> (Receiver<RawTweet>, JoinHandle<Result<ReplayStats, ReplayError>>)
where
    R: BufRead + Send + 'static,
{
    let (tx, rx): (SyncSender<RawTweet>, Receiver<RawTweet>) = sync_channel(HANDOFF_CAPACITY);
    let handle = thread::spawn(move || {
        replay(source, speed, |t| tx.send(t).is_ok(), |line, e| debug!("skipping line {line}: {e}"))
    });
    (rx, handle)
}

/// Loopback TCP source that serves JSON lines to one client, standing in for a
/// live collector connection.
pub struct MockStream {
    addr: SocketAddr,
    handle: JoinHandle<io::Result<()>>,
}

impl MockStream {
    /// Binds an ephemeral loopback port and serves `lines`, newline framed,
    /// to the first client that connects.
    pub fn serve<I>(lines: I) -> io::Result<Self>
    where
        I: IntoIterator<Item = String>,
        I::IntoIter: Send + 'static,
    {
        let listener = TcpListener::bind(("127.0.0.1", 0))?;
        let addr = listener.local_addr()?;
        let lines = lines.into_iter();
        let handle = thread::spawn(move || {
            let (stream, _) = listener.accept()?;
            let mut out = io::BufWriter::new(stream);
            for line in lines {
                out.write_all(line.as_bytes())?;
                out.write_all(b"\n")?;
            }
            out.flush()
        });
        Ok(MockStream { addr, handle })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Waits for the server side to finish writing.
    pub fn finish(self) -> io::Result<()> {
        self.handle.join().unwrap_or_else(|_| Err(io::Error::other("mock stream thread panicked")))
    }
}

/// Connects to a line stream such as one served by [`MockStream`].
pub fn connect(addr: SocketAddr) -> io::Result<BufReader<TcpStream>> {
    Ok(BufReader::new(TcpStream::connect(addr)?))
}
