//! Durable named-graph quad store.
//!
//! Layout under the root directory:
//! * `LOCK`: held with an exclusive file lock for the lifetime of a [`Store`].
//! * `quads.log`: a magic header line followed by one JSON record per committed
//!   batch. Records intern new terms and then replace or delete whole graphs.
//!
//! Graph id 0 is the default graph. Every other id is a dictionary id of an IRI.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions, TryLockError};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::ops::Bound;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock, RwLockReadGuard};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Graph, Iri, Quad, Subject, Term, Triple};

const MAGIC: &str = "osc-quadstore v1";
const LOG_FILE: &str = "quads.log";
const LOCK_FILE: &str = "LOCK";
const DEFAULT_GRAPH: u32 = 0;
/// Superseded graph writes tolerated in the log before it is rewritten.
const COMPACT_AFTER: usize = 64;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("store at {} is held by another writer", .0.display())]
    LockHeld(PathBuf),
    #[error("{} is not a store of a supported format (header {found:?})", path.display())]
    IncompatibleFormat { path: PathBuf, found: String },
    #[error("corrupt store log at line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

impl StoreError {
    pub fn code(&self) -> &'static str {
        match self {
            StoreError::Io(_) => "io-error",
            StoreError::LockHeld(_) => "lock-held",
            StoreError::IncompatibleFormat { .. } => "incompatible-store",
            StoreError::Corrupt { .. } => "corrupt-store",
        }
    }
}

/// Graph position of a [`QuadPattern`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum GraphPattern {
    #[default]
    Any,
    Default,
    Named(Iri),
}

/// A quad pattern; `None` positions are wildcards.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuadPattern {
    pub graph: GraphPattern,
    pub subject: Option<Subject>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
}

impl QuadPattern {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn in_graph(name: &Iri) -> Self {
        QuadPattern {
            graph: GraphPattern::Named(name.clone()),
            ..Self::default()
        }
    }

    pub fn subject(mut self, s: impl Into<Subject>) -> Self {
        self.subject = Some(s.into());
        self
    }

    pub fn predicate(mut self, p: Iri) -> Self {
        self.predicate = Some(p);
        self
    }

    pub fn object(mut self, o: impl Into<Term>) -> Self {
        self.object = Some(o.into());
        self
    }

    /// Brute-force check of a single quad.
    pub fn matches(&self, q: &Quad) -> bool {
        let graph_ok = match &self.graph {
            GraphPattern::Any => true,
            GraphPattern::Default => q.graph.is_none(),
            GraphPattern::Named(n) => q.graph.as_ref() == Some(n),
        };
        graph_ok
            && self.subject.as_ref().is_none_or(|s| *s == q.triple.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == q.triple.predicate)
            && self.object.as_ref().is_none_or(|o| *o == q.triple.object)
    }
}

/// One step of an atomic batch. `graph: None` addresses the default graph.
#[derive(Debug, Clone)]
pub enum WriteOp {
    Put { graph: Option<Iri>, content: Graph },
    Delete { graph: Option<Iri> },
}

#[derive(Serialize, Deserialize)]
struct Record {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    terms: Vec<(u32, Term)>,
    ops: Vec<LogOp>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LogOp {
    Put {
        graph: u32,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        prefixes: BTreeMap<String, String>,
        quads: Vec<[u32; 3]>,
    },
    Delete {
        graph: u32,
    },
}

type Key = [u32; 4];

#[derive(Default)]
struct State {
    /// id - 1 indexes this vector.
    terms: Vec<Term>,
    ids: HashMap<Term, u32>,
    gspo: BTreeSet<Key>,
    gpos: BTreeSet<Key>,
    gosp: BTreeSet<Key>,
    /// Non-empty graphs only.
    sizes: BTreeMap<u32, usize>,
    prefixes: BTreeMap<u32, BTreeMap<String, String>>,
    /// Graph writes in the log that a later write has superseded.
    dead: usize,
}

impl State {
    fn term(&self, id: u32) -> &Term {
        &self.terms[id as usize - 1]
    }

    fn id(&self, t: &Term) -> Option<u32> {
        self.ids.get(t).copied()
    }

    fn graph_id(&self, g: &Option<Iri>) -> Option<u32> {
        match g {
            None => Some(DEFAULT_GRAPH),
            Some(i) => self.id(&Term::Iri(i.clone())),
        }
    }

    fn intern(&mut self, id: u32, t: Term) -> Result<(), String> {
        if id as usize != self.terms.len() + 1 {
            return Err(format!("term id {id} out of sequence"));
        }
        if self.ids.contains_key(&t) {
            return Err(format!("term {t} interned twice"));
        }
        self.ids.insert(t.clone(), id);
        self.terms.push(t);
        Ok(())
    }

    fn remove_graph(&mut self, g: u32) {
        let range = |g: u32| [g, 0, 0, 0]..=[g, u32::MAX, u32::MAX, u32::MAX];
        let keys: Vec<Key> = self.gspo.range(range(g)).copied().collect();
        for [g, s, p, o] in keys {
            self.gspo.remove(&[g, s, p, o]);
            self.gpos.remove(&[g, p, o, s]);
            self.gosp.remove(&[g, o, s, p]);
        }
        if self.sizes.remove(&g).is_some() || self.prefixes.remove(&g).is_some() {
            self.dead += 1;
        }
        self.prefixes.remove(&g);
    }

    fn apply(&mut self, op: &LogOp) -> Result<(), String> {
        match op {
            LogOp::Delete { graph } => {
                self.check_graph(*graph)?;
                self.remove_graph(*graph);
            }
            LogOp::Put { graph, prefixes, quads } => {
                self.check_graph(*graph)?;
                for &[s, p, o] in quads {
                    for id in [s, p, o] {
                        if id == 0 || id as usize > self.terms.len() {
                            return Err(format!("unknown term id {id}"));
                        }
                    }
                    if matches!(self.term(s), Term::Literal(_)) || !matches!(self.term(p), Term::Iri(_)) {
                        return Err("ill-formed quad".to_owned());
                    }
                }
                self.remove_graph(*graph);
                let g = *graph;
                for &[s, p, o] in quads {
                    self.gspo.insert([g, s, p, o]);
                    self.gpos.insert([g, p, o, s]);
                    self.gosp.insert([g, o, s, p]);
                }
                let len = self
                    .gspo
                    .range([g, 0, 0, 0]..=[g, u32::MAX, u32::MAX, u32::MAX])
                    .count();
                if len > 0 {
                    self.sizes.insert(g, len);
                    if !prefixes.is_empty() {
                        self.prefixes.insert(g, prefixes.clone());
                    }
                }
            }
        }
        Ok(())
    }

    fn check_graph(&self, g: u32) -> Result<(), String> {
        if g == DEFAULT_GRAPH || matches!(self.terms.get(g as usize - 1), Some(Term::Iri(_))) {
            Ok(())
        } else {
            Err(format!("graph id {g} is not an IRI"))
        }
    }

    /// Encodes a batch against this dictionary without mutating it.
    fn encode(&self, ops: &[WriteOp]) -> Record {
        let mut fresh: Vec<(u32, Term)> = Vec::new();
        let mut fresh_ids: HashMap<Term, u32> = HashMap::new();
        let mut next = self.terms.len() as u32 + 1;
        let mut id_of = |t: Term| -> u32 {
            if let Some(id) = self.ids.get(&t).or_else(|| fresh_ids.get(&t)) {
                return *id;
            }
            let id = next;
            next += 1;
            fresh_ids.insert(t.clone(), id);
            fresh.push((id, t));
            id
        };
        let graph_of = |g: &Option<Iri>, id_of: &mut dyn FnMut(Term) -> u32| match g {
            None => DEFAULT_GRAPH,
            Some(i) => id_of(Term::Iri(i.clone())),
        };
        let mut log_ops = Vec::with_capacity(ops.len());
        for op in ops {
            log_ops.push(match op {
                WriteOp::Delete { graph } => LogOp::Delete {
                    graph: graph_of(graph, &mut id_of),
                },
                WriteOp::Put { graph, content } => {
                    let graph = graph_of(graph, &mut id_of);
                    let quads = content
                        .iter()
                        .map(|t| {
                            [
                                id_of(Term::from(t.subject.clone())),
                                id_of(Term::Iri(t.predicate.clone())),
                                id_of(t.object.clone()),
                            ]
                        })
                        .collect();
                    let prefixes = if content.is_empty() {
                        BTreeMap::new()
                    } else {
                        content.prefixes().clone()
                    };
                    LogOp::Put { graph, prefixes, quads }
                }
            });
        }
        Record {
            terms: fresh,
            ops: log_ops,
        }
    }

    fn replay(&mut self, record: Record) -> Result<(), String> {
        for (id, t) in record.terms {
            self.intern(id, t)?;
        }
        for op in &record.ops {
            self.apply(op)?;
        }
        Ok(())
    }

    fn name(&self, g: u32) -> Option<Iri> {
        match g {
            DEFAULT_GRAPH => None,
            id => self.term(id).as_iri().cloned(),
        }
    }

    fn quad(&self, [g, s, p, o]: Key) -> Quad {
        let subject = Subject::try_from(self.term(s).clone()).expect("checked on insert");
        let predicate = self.term(p).as_iri().cloned().expect("checked on insert");
        Quad {
            triple: Triple::new(subject, predicate, self.term(o).clone()),
            graph: self.name(g),
        }
    }

    fn scan(&self, pattern: &QuadPattern) -> Vec<Key> {
        let graphs: Vec<u32> = match &pattern.graph {
            GraphPattern::Any => self.sizes.keys().copied().collect(),
            GraphPattern::Default => vec![DEFAULT_GRAPH],
            GraphPattern::Named(n) => match self.id(&Term::Iri(n.clone())) {
                Some(id) => vec![id],
                None => return Vec::new(),
            },
        };
        let bind = |t: Option<Term>| -> Result<Option<u32>, ()> {
            match t {
                None => Ok(None),
                Some(t) => self.id(&t).map(Some).ok_or(()),
            }
        };
        let (Ok(s), Ok(p), Ok(o)) = (
            bind(pattern.subject.clone().map(Term::from)),
            bind(pattern.predicate.clone().map(Term::Iri)),
            bind(pattern.object.clone()),
        ) else {
            return Vec::new();
        };

        let mut out = Vec::new();
        for g in graphs {
            // pick the permutation whose leading positions are bound
            match (s, p, o) {
                (Some(s), _, Some(o)) if p.is_none() => {
                    out.extend(prefix_range(&self.gosp, &[g, o, s]).map(|[g, o, s, p]| [g, s, p, o]))
                }
                (Some(s), p, o) => {
                    let mut prefix = vec![g, s];
                    if let Some(p) = p {
                        prefix.push(p);
                        prefix.extend(o);
                    }
                    out.extend(prefix_range(&self.gspo, &prefix))
                }
                (None, Some(p), o) => {
                    let mut prefix = vec![g, p];
                    prefix.extend(o);
                    out.extend(prefix_range(&self.gpos, &prefix).map(|[g, p, o, s]| [g, s, p, o]))
                }
                (None, None, Some(o)) => out.extend(prefix_range(&self.gosp, &[g, o]).map(|[g, o, s, p]| [g, s, p, o])),
                (None, None, None) => out.extend(prefix_range(&self.gspo, &[g])),
            }
        }
        out
    }

    fn graph(&self, name: &Option<Iri>) -> Option<Graph> {
        let g = self.graph_id(name)?;
        self.sizes.get(&g)?;
        let mut graph: Graph = prefix_range(&self.gspo, &[g]).map(|k| self.quad(k).triple).collect();
        if let Some(p) = self.prefixes.get(&g) {
            graph.set_prefixes(p.clone());
        }
        Some(graph)
    }

    fn live_graphs(&self) -> Vec<(Option<Iri>, Graph)> {
        self.sizes
            .keys()
            .map(|&g| {
                let name = self.name(g);
                let graph = self.graph(&name).expect("listed graphs exist");
                (name, graph)
            })
            .collect()
    }
}

fn prefix_range<'a>(index: &'a BTreeSet<Key>, prefix: &[u32]) -> impl Iterator<Item = Key> + 'a {
    let mut lo = [0u32; 4];
    let mut hi = [u32::MAX; 4];
    lo[..prefix.len()].copy_from_slice(prefix);
    hi[..prefix.len()].copy_from_slice(prefix);
    index.range((Bound::Included(lo), Bound::Included(hi))).copied()
}

/// A consistent read view; writers wait until it is dropped.
pub struct StoreView<'a> {
    state: RwLockReadGuard<'a, State>,
}

impl StoreView<'_> {
    pub fn match_quads(&self, pattern: &QuadPattern) -> Vec<Quad> {
        self.state
            .scan(pattern)
            .into_iter()
            .map(|k| self.state.quad(k))
            .collect()
    }

    pub fn count(&self, pattern: &QuadPattern) -> usize {
        self.state.scan(pattern).len()
    }

    /// Names of all non-empty named graphs.
    pub fn list_graphs(&self) -> BTreeSet<Iri> {
        self.state.sizes.keys().filter_map(|&g| self.state.name(g)).collect()
    }

    /// The graph's triples and recorded prefix map; `None` when it is empty.
    pub fn graph(&self, name: &Iri) -> Option<Graph> {
        self.state.graph(&Some(name.clone()))
    }

    pub fn default_graph(&self) -> Graph {
        self.state.graph(&None).unwrap_or_default()
    }

    pub fn contains_graph(&self, name: &Iri) -> bool {
        self.state
            .id(&Term::Iri(name.clone()))
            .is_some_and(|g| self.state.sizes.contains_key(&g))
    }
}

struct Writer {
    log: File,
    path: PathBuf,
}

pub struct Store {
    root: PathBuf,
    _lock: File,
    writer: Mutex<Writer>,
    state: RwLock<State>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("root", &self.root)
            .finish_non_exhaustive()
    }
}

impl Store {
    /// Opens or creates the store under `root`, taking the writer lock.
    pub fn open(root: impl AsRef<Path>) -> Result<Store, StoreError> {
        let root = root.as_ref().to_path_buf();
        std::fs::create_dir_all(&root)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(root.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(TryLockError::WouldBlock) => return Err(StoreError::LockHeld(root)),
            Err(TryLockError::Error(e)) => return Err(e.into()),
        }

        let path = root.join(LOG_FILE);
        let mut log = OpenOptions::new()
            .create(true)
            .truncate(false)
            .read(true)
            .write(true)
            .open(&path)?;
        let state = load(&mut log, &path)?;
        let store = Store {
            root,
            _lock: lock,
            writer: Mutex::new(Writer { log, path }),
            state: RwLock::new(state),
        };
        if store.state.read().expect("lock poisoned").dead >= COMPACT_AFTER {
            store.compact()?;
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn read(&self) -> StoreView<'_> {
        StoreView {
            state: self.state.read().expect("lock poisoned"),
        }
    }

    pub fn match_quads(&self, pattern: &QuadPattern) -> Vec<Quad> {
        self.read().match_quads(pattern)
    }

    pub fn count(&self, pattern: &QuadPattern) -> usize {
        self.read().count(pattern)
    }

    pub fn list_graphs(&self) -> BTreeSet<Iri> {
        self.read().list_graphs()
    }

    pub fn graph(&self, name: &Iri) -> Option<Graph> {
        self.read().graph(name)
    }

    /// Replaces the named graph with `g`, recording its prefix map.
    pub fn put_graph(&self, name: &Iri, g: &Graph) -> Result<(), StoreError> {
        self.apply(vec![WriteOp::Put {
            graph: Some(name.clone()),
            content: g.clone(),
        }])
    }

    /// Removes the named graph; missing graphs are ignored.
    pub fn delete_graph(&self, name: &Iri) -> Result<(), StoreError> {
        self.apply(vec![WriteOp::Delete {
            graph: Some(name.clone()),
        }])
    }

    /// Commits every op as one durable log record; readers see all or none.
    pub fn apply(&self, ops: Vec<WriteOp>) -> Result<(), StoreError> {
        if ops.is_empty() {
            return Ok(());
        }
        let mut writer = self.writer.lock().expect("lock poisoned");
        let record = self.state.read().expect("lock poisoned").encode(&ops);
        let mut line = serde_json::to_vec(&record).expect("records always serialize");
        line.push(b'\n');

        let before = writer.log.seek(SeekFrom::End(0))?;
        if let Err(e) = writer.log.write_all(&line).and_then(|_| writer.log.sync_data()) {
            // drop the partial record so the log stays replayable
            let _ = writer.log.set_len(before);
            return Err(e.into());
        }

        let dead = {
            let mut state = self.state.write().expect("lock poisoned");
            state.replay(record).expect("encoded against the current dictionary");
            state.dead
        };
        if dead >= COMPACT_AFTER {
            self.compact_locked(&mut writer)?;
        }
        Ok(())
    }

    /// Rewrites the log with only live graphs and a fresh dictionary.
    pub fn compact(&self) -> Result<(), StoreError> {
        let mut writer = self.writer.lock().expect("lock poisoned");
        self.compact_locked(&mut writer)
    }

    fn compact_locked(&self, writer: &mut Writer) -> Result<(), StoreError> {
        let live = self.state.read().expect("lock poisoned").live_graphs();
        let ops: Vec<WriteOp> = live
            .into_iter()
            .map(|(graph, content)| WriteOp::Put { graph, content })
            .collect();
        let mut fresh = State::default();
        let record = fresh.encode(&ops);

        let tmp = writer.path.with_extension("log.tmp");
        {
            let mut out = File::create(&tmp)?;
            out.write_all(MAGIC.as_bytes())?;
            out.write_all(b"\n")?;
            if !ops.is_empty() {
                serde_json::to_writer(&mut out, &record).map_err(io::Error::from)?;
                out.write_all(b"\n")?;
            }
            out.sync_all()?;
        }
        std::fs::rename(&tmp, &writer.path)?;
        if let Ok(dir) = File::open(&self.root) {
            let _ = dir.sync_all();
        }
        writer.log = OpenOptions::new().read(true).write(true).open(&writer.path)?;

        fresh.replay(record).expect("encoded against a fresh dictionary");
        fresh.dead = 0;
        *self.state.write().expect("lock poisoned") = fresh;
        Ok(())
    }
}

fn load(log: &mut File, path: &Path) -> Result<State, StoreError> {
    let mut bytes = Vec::new();
    log.read_to_end(&mut bytes)?;
    if bytes.is_empty() {
        log.write_all(MAGIC.as_bytes())?;
        log.write_all(b"\n")?;
        log.sync_all()?;
        return Ok(State::default());
    }

    let header_end = bytes.iter().position(|&b| b == b'\n');
    let header = &bytes[..header_end.unwrap_or(bytes.len())];
    if header != MAGIC.as_bytes() {
        return Err(StoreError::IncompatibleFormat {
            path: path.to_path_buf(),
            found: String::from_utf8_lossy(&header[..header.len().min(64)]).into_owned(),
        });
    }
    let Some(header_end) = header_end else {
        log.write_all(b"\n")?;
        return Ok(State::default());
    };

    let mut state = State::default();
    let mut offset = header_end + 1;
    let mut line_no = 1;
    while offset < bytes.len() {
        line_no += 1;
        let Some(len) = bytes[offset..].iter().position(|&b| b == b'\n') else {
            // torn final record from an interrupted write: discard it
            log.set_len(offset as u64)?;
            log.sync_all()?;
            break;
        };
        let line = &bytes[offset..offset + len];
        let record: Record = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
            line: line_no,
            message: e.to_string(),
        })?;
        state
            .replay(record)
            .map_err(|message| StoreError::Corrupt { line: line_no, message })?;
        offset += len + 1;
    }
    Ok(state)
}
