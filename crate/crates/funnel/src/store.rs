//! Hash-routed, append-only document store.
//!
//! Layout under the store root:
//!
//! ```text
//! ROOT/manifest.json            {"shard_count": N, "topics": [...]}
//! ROOT/TOPIC/shard-K.jsonl      one Document per line, K in 0..N
//! ```
//!
//! A document goes to shard `route_key(tweet_id, N)`. Shard files are only
//! ever appended to; an in-memory key index (key -> latest offset) is rebuilt
//! when a collection is first opened, so a later write of the same key wins.
//! A record cut short by a crash is skipped, counted, and trimmed off the file
//! before new appends.
//!
//! Puts to different shards run in parallel; puts to one shard are serialized
//! by its lock. A put is acknowledged once its line has been handed to the OS
//! in a single write; [`ShardStore::sync`] flushes to disk.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::os::unix::fs::FileExt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use funnel_core::tweet::is_valid_topic_name;
use funnel_core::{route_key, CleanTweet};
use log::warn;
use serde::{Deserialize, Serialize};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown topic {0:?}")]
    UnknownTopic(String),
    #[error("invalid topic name {0:?}")]
    InvalidTopicName(String),
    #[error("shard count must be at least 1")]
    ZeroShards,
    #[error("store at {root} has {on_disk} shards, {requested} requested; re-shard explicitly")]
    ShardCountMismatch { root: PathBuf, on_disk: usize, requested: usize },
    #[error("empty document key")]
    EmptyKey,
    #[error("document topic {doc:?} does not match {topic:?}")]
    TopicMismatch { topic: String, doc: String },
    #[error("invalid time range [{start}, {end})")]
    InvalidRange { start: i64, end: i64 },
    #[error("storage full writing {path}")]
    StorageFull { path: PathBuf, source: io::Error },
    #[error("I/O failure on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt {what} in {path}: {source}")]
    Corrupt { what: &'static str, path: PathBuf, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| {
        if source.kind() == io::ErrorKind::StorageFull {
            StoreError::StorageFull { path: path.to_path_buf(), source }
        } else {
            StoreError::Io { path: path.to_path_buf(), source }
        }
    }
}

/// Half-open interval `[start, end)` of `created_at` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRange {
    pub start: i64,
    pub end: i64,
}

impl TimeRange {
    pub fn new(start: i64, end: i64) -> Result<Self, StoreError> {
        if start < end {
            Ok(TimeRange { start, end })
        } else {
            Err(StoreError::InvalidRange { start, end })
        }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }
}

/// One stored tweet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    /// The tweet id.
    pub key: String,
    pub topic: String,
    pub payload: CleanTweet,
    /// Seconds since the epoch when the document was written.
    pub stored_at: i64,
}

impl Document {
    pub fn new(topic: &str, payload: CleanTweet) -> Self {
        let stored_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs() as i64).unwrap_or(0);
        Document { key: payload.tweet.tweet_id.clone(), topic: topic.to_string(), payload, stored_at }
    }

    pub fn created_at(&self) -> i64 {
        self.payload.tweet.created_at
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub shard_count: usize,
    pub topics: Vec<String>,
}

/// Snapshot of a store's configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardConfig {
    pub shard_count: usize,
    pub root_path: PathBuf,
    pub topic_registry: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy)]
struct IndexEntry {
    offset: u64,
    len: u32,
    created_at: i64,
}

struct Shard {
    path: PathBuf,
    writer: File,
    end: u64,
    index: HashMap<String, IndexEntry>,
}

struct Collection {
    shards: Vec<Mutex<Shard>>,
    readers: Vec<File>,
    reads: Vec<AtomicU64>,
    skipped: u64,
}

/// Minimal view of a stored line, enough to index it.
#[derive(Deserialize)]
struct Probe {
    key: String,
    payload: ProbePayload,
}

#[derive(Deserialize)]
struct ProbePayload {
    created_at: i64,
}

impl Collection {
    fn open(dir: &Path, shard_count: usize) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut shards = Vec::with_capacity(shard_count);
        let mut readers = Vec::with_capacity(shard_count);
        let mut skipped = 0;
        for k in 0..shard_count {
            let path = dir.join(format!("shard-{k}.jsonl"));
            let (shard, bad) = Shard::open(path)?;
            readers.push(File::open(&shard.path).map_err(io_err(&shard.path))?);
            shards.push(Mutex::new(shard));
            skipped += bad;
        }
        let reads = (0..shard_count).map(|_| AtomicU64::new(0)).collect();
        Ok(Collection { shards, readers, reads, skipped })
    }
}

impl Shard {
    /// Opens (creating if needed) a shard file and rebuilds its index.
    /// Returns the shard and the number of unreadable records skipped.
    fn open(path: PathBuf) -> Result<(Self, u64), StoreError> {
        let writer = OpenOptions::new().create(true).append(true).read(true).open(&path).map_err(io_err(&path))?;
        let mut index = HashMap::new();
        let mut skipped = 0u64;
        let mut offset = 0u64;
        let mut reader = BufReader::new(File::open(&path).map_err(io_err(&path))?);
        let mut buf = Vec::new();
        loop {
            buf.clear();
            let n = reader.read_until(b'\n', &mut buf).map_err(io_err(&path))?;
            if n == 0 {
                break;
            }
            if buf.last() != Some(&b'\n') {
                warn!("{}: dropping {n} bytes of a partial trailing record", path.display());
                skipped += 1;
                writer.set_len(offset).map_err(io_err(&path))?;
                break;
            }
            match serde_json::from_slice::<Probe>(&buf) {
                Ok(p) => {
                    index.insert(p.key, IndexEntry { offset, len: n as u32, created_at: p.payload.created_at });
                }
                Err(e) => {
                    warn!("{}: skipping unreadable record at byte {offset}: {e}", path.display());
                    skipped += 1;
                }
            }
            offset += n as u64;
        }
        Ok((Shard { path, writer, end: offset, index }, skipped))
    }
}

pub struct ShardStore {
    root: PathBuf,
    shard_count: usize,
    topics: Mutex<BTreeSet<String>>,
    collections: RwLock<BTreeMap<String, Arc<Collection>>>,
}

impl ShardStore {
    /// Opens the store at `root`, creating it with `shard_count` shards if it
    /// does not exist. An existing store must have been created with the same
    /// shard count.
    pub fn open(root: impl AsRef<Path>, shard_count: usize) -> Result<Self, StoreError> {
        if shard_count == 0 {
            return Err(StoreError::ZeroShards);
        }
        let root = root.as_ref().to_path_buf();
        let manifest = match Self::read_manifest(&root)? {
            Some(m) if m.shard_count != shard_count => {
                return Err(StoreError::ShardCountMismatch { root, on_disk: m.shard_count, requested: shard_count });
            }
            Some(m) => m,
            None => {
                fs::create_dir_all(&root).map_err(io_err(&root))?;
                let m = Manifest { shard_count, topics: Vec::new() };
                write_manifest(&root, &m)?;
                m
            }
        };
        Ok(Self::from_manifest(root, manifest))
    }

    /// Opens an existing store, taking the shard count from its manifest.
    pub fn open_existing(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        let manifest_path = root.join(MANIFEST_FILE);
        match Self::read_manifest(&root)? {
            Some(m) => Ok(Self::from_manifest(root, m)),
            None => Err(StoreError::Io { path: manifest_path, source: io::ErrorKind::NotFound.into() }),
        }
    }

    fn from_manifest(root: PathBuf, m: Manifest) -> Self {
        ShardStore {
            root,
            shard_count: m.shard_count,
            topics: Mutex::new(m.topics.into_iter().collect()),
            collections: RwLock::new(BTreeMap::new()),
        }
    }

    fn read_manifest(root: &Path) -> Result<Option<Manifest>, StoreError> {
        let path = root.join(MANIFEST_FILE);
        match fs::read(&path) {
            Ok(bytes) => {
                let m: Manifest = serde_json::from_slice(&bytes).map_err(|source| StoreError::Corrupt { what: "manifest", path: path.clone(), source })?;
                if m.shard_count == 0 {
                    return Err(StoreError::ZeroShards);
                }
                Ok(Some(m))
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn shard_count(&self) -> usize {
        self.shard_count
    }

    pub fn config(&self) -> ShardConfig {
        ShardConfig { shard_count: self.shard_count, root_path: self.root.clone(), topic_registry: self.topics.lock().unwrap().clone() }
    }

    pub fn has_topic(&self, topic: &str) -> bool {
        self.topics.lock().unwrap().contains(topic)
    }

    /// Adds `topic` to the manifest. Registering an existing topic is a no-op.
    pub fn register_topic(&self, topic: &str) -> Result<(), StoreError> {
        if !is_valid_topic_name(topic) {
            return Err(StoreError::InvalidTopicName(topic.to_string()));
        }
        let mut topics = self.topics.lock().unwrap();
        if topics.contains(topic) {
            return Ok(());
        }
        let mut next = topics.clone();
        next.insert(topic.to_string());
        write_manifest(&self.root, &Manifest { shard_count: self.shard_count, topics: next.iter().cloned().collect() })?;
        *topics = next;
        Ok(())
    }

    fn collection(&self, topic: &str) -> Result<Arc<Collection>, StoreError> {
        if let Some(c) = self.collections.read().unwrap().get(topic) {
            return Ok(Arc::clone(c));
        }
        if !self.has_topic(topic) {
            return Err(StoreError::UnknownTopic(topic.to_string()));
        }
        let mut map = self.collections.write().unwrap();
        if let Some(c) = map.get(topic) {
            return Ok(Arc::clone(c));
        }
        let c = Arc::new(Collection::open(&self.root.join(topic), self.shard_count)?);
        map.insert(topic.to_string(), Arc::clone(&c));
        Ok(c)
    }

    /// Appends `doc` to its shard. A later put of the same key supersedes it.
    pub fn put_doc(&self, topic: &str, doc: &Document) -> Result<(), StoreError> {
        if doc.key.is_empty() {
            return Err(StoreError::EmptyKey);
        }
        if doc.topic != topic {
            return Err(StoreError::TopicMismatch { topic: topic.to_string(), doc: doc.topic.clone() });
        }
        let collection = self.collection(topic)?;
        let shard_idx = route_key(&doc.key, self.shard_count).map_err(|_| StoreError::ZeroShards)?;
        let mut line = serde_json::to_vec(doc).expect("documents serialize");
        line.push(b'\n');

        let mut shard = collection.shards[shard_idx].lock().unwrap();
        let offset = shard.end;
        if let Err(e) = shard.writer.write_all(&line) {
            // Drop whatever part of the record made it out so the next append
            // starts on a clean line.
            let _ = shard.writer.set_len(offset);
            return Err(io_err(&shard.path)(e));
        }
        shard.end += line.len() as u64;
        shard.index.insert(doc.key.clone(), IndexEntry { offset, len: line.len() as u32, created_at: doc.created_at() });
        Ok(())
    }

    /// Stores a cleaned tweet under its id, stamped with the current time.
    pub fn put_tweet(&self, topic: &str, tweet: CleanTweet) -> Result<(), StoreError> {
        self.put_doc(topic, &Document::new(topic, tweet))
    }

    /// Latest document for `key`, read from the single shard it routes to.
    pub fn get_doc(&self, topic: &str, key: &str) -> Result<Option<Document>, StoreError> {
        let collection = self.collection(topic)?;
        if key.is_empty() {
            return Ok(None);
        }
        let shard_idx = route_key(key, self.shard_count).map_err(|_| StoreError::ZeroShards)?;
        let entry = collection.shards[shard_idx].lock().unwrap().index.get(key).copied();
        match entry {
            Some(e) => read_doc(&collection, shard_idx, e).map(Some),
            None => {
                collection.reads[shard_idx].fetch_add(1, Ordering::Relaxed);
                Ok(None)
            }
        }
    }

    /// Latest version of every document with `created_at` in `range`, in
    /// `(created_at, key)` order across all shards.
    ///
    /// The set of documents is fixed when the call starts: puts acknowledged
    /// before it are included, later ones may be missing.
    pub fn scan_collection(&self, topic: &str, range: Option<TimeRange>) -> Result<Scan, StoreError> {
        let collection = self.collection(topic)?;
        let mut entries: Vec<(i64, String, usize, IndexEntry)> = Vec::new();
        for (k, shard) in collection.shards.iter().enumerate() {
            let shard = shard.lock().unwrap();
            entries.extend(
                shard
                    .index
                    .iter()
                    .filter(|(_, e)| range.is_none_or(|r| r.contains(e.created_at)))
                    .map(|(key, e)| (e.created_at, key.clone(), k, *e)),
            );
        }
        entries.sort_unstable_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        Ok(Scan { collection, entries: entries.into_iter() })
    }

    /// Number of distinct keys per shard.
    pub fn shard_sizes(&self, topic: &str) -> Result<Vec<usize>, StoreError> {
        let c = self.collection(topic)?;
        Ok(c.shards.iter().map(|s| s.lock().unwrap().index.len()).collect())
    }

    /// Distinct documents in `topic`.
    pub fn len(&self, topic: &str) -> Result<usize, StoreError> {
        Ok(self.shard_sizes(topic)?.iter().sum())
    }

    /// Reads served per shard since the collection was opened.
    pub fn shard_read_counts(&self, topic: &str) -> Result<Vec<u64>, StoreError> {
        let c = self.collection(topic)?;
        Ok(c.reads.iter().map(|r| r.load(Ordering::Relaxed)).collect())
    }

    /// Records skipped as unreadable when the collection was opened.
    pub fn skipped_records(&self, topic: &str) -> Result<u64, StoreError> {
        Ok(self.collection(topic)?.skipped)
    }

    /// Flushes every open shard file to disk.
    pub fn sync(&self) -> Result<(), StoreError> {
        for c in self.collections.read().unwrap().values() {
            for shard in &c.shards {
                let shard = shard.lock().unwrap();
                shard.writer.sync_data().map_err(io_err(&shard.path))?;
            }
        }
        Ok(())
    }
}

fn read_doc(collection: &Collection, shard_idx: usize, entry: IndexEntry) -> Result<Document, StoreError> {
    collection.reads[shard_idx].fetch_add(1, Ordering::Relaxed);
    let file = &collection.readers[shard_idx];
    let mut buf = vec![0u8; entry.len as usize];
    let path = || collection.shards[shard_idx].lock().unwrap().path.clone();
    file.read_exact_at(&mut buf, entry.offset).map_err(|e| io_err(&path())(e))?;
    serde_json::from_slice(&buf).map_err(|source| StoreError::Corrupt { what: "document", path: path(), source })
}

fn write_manifest(root: &Path, m: &Manifest) -> Result<(), StoreError> {
    let path = root.join(MANIFEST_FILE);
    let tmp = root.join(format!("{MANIFEST_FILE}.tmp"));
    let mut body = serde_json::to_vec_pretty(m).expect("manifest serializes");
    body.push(b'\n');
    let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(&body).and_then(|_| f.sync_all()).map_err(io_err(&tmp))?;
    fs::rename(&tmp, &path).map_err(io_err(&path))
}

/// Documents from [`ShardStore::scan_collection`], read lazily.
pub struct Scan {
    collection: Arc<Collection>,
    entries: std::vec::IntoIter<(i64, String, usize, IndexEntry)>,
}

impl Iterator for Scan {
    type Item = Result<Document, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        let (_, _, shard, entry) = self.entries.next()?;
        Some(read_doc(&self.collection, shard, entry))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.entries.size_hint()
    }
}

impl ExactSizeIterator for Scan {}
