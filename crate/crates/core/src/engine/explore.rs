use std::time::Instant;

use super::state::SymbolicState;
use super::strategy::{choose_next, Candidate, RandomPicker, Strategy};
use super::table::{Entry, SubsumptionTable};
use super::{DseiResult, EngineConfig, Event, ExplorationStats, Mode};
use crate::interp::{Interpolant, Interpolator, Post, PropagationInput};
use crate::lang::{execute_traced, ConcreteOutcome, Program, ProgramPoint, Stmt};
use crate::solver::{Formula, Model, SatResult, Solver};

/// Why a run ended without a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Timeout,
    /// The solver gave up on a constraint the verdict depends on.
    Inconclusive,
}

struct Node {
    parent: Option<usize>,
    via: Option<usize>,
    point: ProgramPoint,
    depth: u32,
    state: Option<SymbolicState>,
    model: Option<Model>,
    context: Option<Formula>,
    pending: usize,
    acc: Option<Interpolant>,
    truncated: bool,
}

#[derive(Clone, Copy, Debug)]
struct Item {
    parent: usize,
    transition: usize,
}

enum Child {
    Infeasible(ProgramPoint),
    Feasible {
        state: SymbolicState,
        model: Option<Model>,
        over_bound: bool,
    },
}

/// One exploration of the symbolic execution tree. Keeps the subsumption
/// table, statistics and, on request, an event log and per-node paths.
pub struct Explorer<'p> {
    program: &'p Program,
    config: EngineConfig,
    mode: Mode,
    solver: Solver,
    table: SubsumptionTable,
    root: Option<SymbolicState>,
    nodes: Vec<Node>,
    frontier: Vec<Item>,
    visits: Vec<u64>,
    head_index: Vec<Option<usize>>,
    picker: RandomPicker,
    stats: ExplorationStats,
    events: Vec<Event>,
    paths: Vec<(ProgramPoint, Vec<usize>)>,
    error_node: Option<usize>,
}

impl<'p> Explorer<'p> {
    pub fn new(program: &'p Program, config: EngineConfig) -> Self {
        Explorer::with_mode(program, config, Mode::Dsei)
    }

    pub fn with_mode(program: &'p Program, config: EngineConfig, mode: Mode) -> Self {
        let ts = program.system();
        let mut head_index = vec![None; ts.num_points() as usize];
        for (i, h) in ts.loop_heads().iter().enumerate() {
            head_index[h.0 as usize] = Some(i);
        }
        Explorer {
            program,
            solver: Solver::new(config.solver.clone()),
            picker: RandomPicker::new(config.seed),
            mode,
            table: SubsumptionTable::new(),
            root: Some(SymbolicState::initial(program)),
            nodes: Vec::new(),
            frontier: Vec::new(),
            visits: vec![0; ts.num_points() as usize],
            head_index,
            stats: ExplorationStats::default(),
            events: Vec::new(),
            paths: Vec::new(),
            error_node: None,
            config,
        }
    }

    /// Starts from a previously populated table.
    pub fn with_table(mut self, table: SubsumptionTable) -> Self {
        self.table = table;
        self
    }

    /// Starts from `state` instead of the program's initial state.
    pub fn from_state(mut self, state: SymbolicState) -> Self {
        self.root = Some(state);
        self
    }

    pub fn table(&self) -> &SubsumptionTable {
        &self.table
    }

    pub fn into_table(self) -> SubsumptionTable {
        self.table
    }

    pub fn stats(&self) -> &ExplorationStats {
        &self.stats
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Point and transition path of every node created, in creation order.
    /// Empty unless path recording is on.
    pub fn node_paths(&self) -> &[(ProgramPoint, Vec<usize>)] {
        &self.paths
    }

    /// Runs the exploration to completion, timeout or the first error.
    pub fn run(&mut self) -> Result<DseiResult, Stop> {
        let started = Instant::now();
        let out = self.drive(started);
        self.stats.wall_time = started.elapsed();
        self.stats.solver_calls = self.solver.calls();
        if out == Err(Stop::Inconclusive) {
            self.stats.inconclusive += 1;
        }
        out
    }

    fn drive(&mut self, started: Instant) -> Result<DseiResult, Stop> {
        let root = self.root.take().expect("explorer already ran");
        let child = if root.pc().is_true() {
            Child::Feasible { state: root, model: Some(Model::new()), over_bound: false }
        } else {
            match self.solver.is_sat(root.pc()) {
                Ok(SatResult::Unsat) => Child::Infeasible(root.point()),
                Ok(SatResult::Sat(m)) => Child::Feasible { state: root, model: Some(m), over_bound: false },
                Err(_) => Child::Feasible { state: root, model: None, over_bound: false },
            }
        };
        if let Some(r) = self.admit(None, None, child)? {
            return Ok(r);
        }
        while !self.frontier.is_empty() {
            if let Some(limit) = self.config.timeout {
                if started.elapsed() > limit {
                    return Err(Stop::Timeout);
                }
            }
            let item = match self.config.strategy {
                Strategy::Dfs => self.frontier.pop().expect("non-empty"),
                Strategy::Random => {
                    let cands: Vec<Candidate> = self
                        .frontier
                        .iter()
                        .map(|it| Candidate {
                            point: self.program.system().transition(it.transition).to,
                            depth: self.nodes[it.parent].depth + 1,
                            closes_parent: self.nodes[it.parent].pending == 1,
                        })
                        .collect();
                    let i = choose_next(&cands, Strategy::Random, &mut self.picker, &self.visits);
                    self.frontier.swap_remove(i)
                }
            };
            let child = self.successor(item);
            if let Some(r) = self.admit(Some(item.parent), Some(item.transition), child)? {
                return Ok(r);
            }
        }
        unreachable!("frontier exhausted before the root completed")
    }

    fn successor(&self, item: Item) -> Child {
        let t = self.program.system().transition(item.transition);
        let parent = &self.nodes[item.parent];
        let ps = parent.state.as_ref().expect("expanded node keeps its state");
        let mut state = ps.moved(t.to);
        let mut model = parent.model.clone();
        match &t.stmt {
            Stmt::Assign(x, e) => state.assign(x, e),
            Stmt::Assume(a) => {
                let ea = ps.eval_atom(a);
                if ea.is_false() {
                    return Child::Infeasible(t.to);
                }
                if !ea.is_true() {
                    let by_model = model
                        .as_ref()
                        .is_some_and(|m| matches!(ea.eval_with(|v| m.get(v)), Ok(true)));
                    state.constrain(ea);
                    if !by_model {
                        match self.solver.is_sat(state.pc()) {
                            Ok(SatResult::Sat(m)) => model = Some(m),
                            Ok(SatResult::Unsat) => return Child::Infeasible(t.to),
                            Err(_) => model = None,
                        }
                    }
                }
            }
            Stmt::Error | Stmt::Halt => unreachable!("terminal statements are never expanded"),
        }
        let mut over_bound = false;
        if let Some(h) = self.head_index[t.to.0 as usize] {
            let c = &mut state.counters_mut()[h];
            if t.back_edge {
                *c += 1;
            } else {
                *c = 0;
            }
            over_bound = *c > self.config.loop_bound;
        }
        Child::Feasible { state, model, over_bound }
    }

    fn admit(&mut self, parent: Option<usize>, via: Option<usize>, child: Child) -> Result<Option<DseiResult>, Stop> {
        let id = self.nodes.len();
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        let point = match &child {
            Child::Infeasible(p) => *p,
            Child::Feasible { state, .. } => state.point(),
        };
        self.stats.nodes_created += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.visits[point.0 as usize] += 1;
        if self.config.record_paths {
            let mut path = parent.map(|p| self.paths[p].1.clone()).unwrap_or_default();
            path.extend(via);
            self.paths.push((point, path));
        }
        self.nodes.push(Node {
            parent,
            via,
            point,
            depth,
            state: None,
            model: None,
            context: None,
            pending: 0,
            acc: None,
            truncated: false,
        });
        self.log(Event::Created { node: id, point, depth });

        let (state, model, over_bound) = match child {
            Child::Infeasible(_) => {
                self.stats.infeasible_nodes += 1;
                self.log(Event::Infeasible { node: id, point });
                return self.complete(id, Post::False);
            }
            Child::Feasible { state, model, over_bound } => (state, model, over_bound),
        };

        if self.mode == Mode::Dsei {
            if let Some((psi, truncated)) = self.subsuming(&state) {
                self.stats.nodes_subsumed += 1;
                self.log(Event::Subsumed { node: id, point, by: psi.clone() });
                let node = &mut self.nodes[id];
                node.truncated = truncated;
                node.state = Some(state);
                return self.complete(id, Post::Intp(psi));
            }
        }

        let ts = self.program.system();
        let out = ts.outgoing(point);
        if out.iter().any(|&i| ts.transition(i).stmt == Stmt::Error) {
            self.stats.leaf_states += 1;
            let model = match model {
                Some(m) => m,
                None => match self.solver.is_sat(state.pc()) {
                    Ok(SatResult::Sat(m)) => m,
                    _ => return Err(Stop::Inconclusive),
                },
            };
            return Ok(Some(self.found_error(id, state, model)));
        }
        if out.is_empty() || out.iter().any(|&i| ts.transition(i).stmt == Stmt::Halt) {
            self.stats.leaf_states += 1;
            let phi = self.program.safety().clone();
            for a in phi.atoms() {
                let violated = state.pc().with(state.eval_atom(a).negate());
                match self.solver.is_sat(&violated) {
                    Ok(SatResult::Unsat) => {}
                    Ok(SatResult::Sat(m)) => return Ok(Some(self.found_error(id, state, m))),
                    Err(_) => return Err(Stop::Inconclusive),
                }
            }
            if self.config.record_events {
                self.log(Event::Halted { node: id, point, model: model.clone() });
            }
            self.nodes[id].state = Some(state);
            return self.complete(id, Post::Intp(Interpolant::new(phi)));
        }
        if over_bound {
            self.stats.leaf_states += 1;
            self.stats.truncated_paths += 1;
            self.log(Event::Truncated { node: id, point });
            let node = &mut self.nodes[id];
            node.truncated = true;
            node.state = Some(state);
            return self.complete(id, Post::Intp(Interpolant::truth()));
        }

        let node = &mut self.nodes[id];
        node.state = Some(state);
        node.model = model;
        node.pending = out.len();
        for &t in out.iter().rev() {
            self.frontier.push(Item { parent: id, transition: t });
        }
        Ok(None)
    }

    fn found_error(&mut self, id: usize, state: SymbolicState, model: Model) -> DseiResult {
        self.log(Event::ErrorFound { node: id, point: state.point() });
        let node = &mut self.nodes[id];
        node.model = Some(model);
        node.state = Some(state.clone());
        self.error_node = Some(id);
        DseiResult::ErrorFound(state)
    }

    /// The most recent admissible table entry whose interpolant the state
    /// entails, and whether that entry came from a truncated subtree.
    fn subsuming(&self, state: &SymbolicState) -> Option<(Interpolant, bool)> {
        self.table
            .lookup(state.point())
            .filter(|e| e.admits(state.counters()))
            .find(|e| {
                let goal = state.eval_formula(e.interpolant.formula());
                self.solver.entails_sat(state.pc(), &goal)
            })
            .map(|e| (e.interpolant.clone(), e.counters.is_some()))
    }

    /// Hands `post` up the tree until an ancestor still waits for other
    /// children. Returns the root's result once the root completes.
    fn complete(&mut self, id: usize, post: Post) -> Result<Option<DseiResult>, Stop> {
        let mut cur = id;
        let mut post = post;
        loop {
            let node = &mut self.nodes[cur];
            let state = node.state.take();
            node.context = None;
            node.model = None;
            if self.config.check_contracts {
                if let (Post::Intp(psi), Some(s)) = (&post, &state) {
                    assert!(
                        self.solver.entails(&s.context(), psi.formula()),
                        "interpolant {psi} does not hold at node {cur} ({})",
                        s.point()
                    );
                }
            }
            let node = &self.nodes[cur];
            let Some(parent) = node.parent else {
                return Ok(Some(match post {
                    Post::False => DseiResult::FalseMarker,
                    Post::Intp(psi) => DseiResult::Intp(psi),
                }));
            };
            let via = node.via.expect("non-root node has an incoming transition");
            let truncated = node.truncated;

            if self.mode == Mode::Dsei {
                if self.nodes[parent].context.is_none() {
                    let ctx = self.nodes[parent].state.as_ref().expect("pending parent keeps its state").context();
                    self.nodes[parent].context = Some(ctx);
                }
                let input = PropagationInput {
                    context: self.nodes[parent].context.clone().expect("just computed"),
                    stmt: Some(self.program.system().transition(via).stmt.clone()),
                    post,
                };
                let (psi, rule) = Interpolator::new(&self.solver)
                    .checking_contracts(self.config.check_contracts)
                    .backprop_rule(&input)
                    .unwrap_or_else(|e| panic!("back-propagation over transition {via}: {e}"));
                self.log(Event::Propagated {
                    node: parent,
                    point: self.nodes[parent].point,
                    transition: via,
                    rule,
                    interpolant: psi.clone(),
                });
                let p = &mut self.nodes[parent];
                p.acc = Some(match p.acc.take() {
                    Some(acc) => acc.and(&psi),
                    None => psi,
                });
            }

            let p = &mut self.nodes[parent];
            p.truncated |= truncated;
            p.pending -= 1;
            if p.pending > 0 {
                return Ok(None);
            }
            let psi = p.acc.take().unwrap_or_default();
            if self.mode == Mode::Dsei {
                let counters = p
                    .truncated
                    .then(|| p.state.as_ref().expect("pending parent keeps its state").counters().to_vec());
                let point = p.point;
                let entry = Entry { interpolant: psi.clone(), counters };
                if self.table.insert(point, entry) {
                    self.stats.interpolants_stored += 1;
                    self.log(Event::Stored { node: parent, point, interpolant: psi.clone() });
                }
            }
            cur = parent;
            post = Post::Intp(psi);
        }
    }

    fn log(&mut self, e: Event) {
        if self.config.record_events {
            self.events.push(e);
        }
    }

    /// Transition path from the root to the error node, if one was found.
    pub fn error_path(&self) -> Option<Vec<usize>> {
        let mut cur = self.error_node?;
        let mut path = Vec::new();
        while let Some(t) = self.nodes[cur].via {
            path.push(t);
            cur = self.nodes[cur].parent.expect("node with incoming transition has a parent");
        }
        path.reverse();
        Some(path)
    }

    /// Input model for the error found, completed for every symbolic
    /// variable, and checked by concrete replay along the same path.
    pub fn witness(&self) -> Option<(Model, Vec<usize>)> {
        let id = self.error_node?;
        let path = self.error_path()?;
        let mut model = self.nodes[id].model.clone()?;
        for s in self.program.symbolic_vars() {
            if model.get(&s.name).is_none() {
                let v = s.bounds.map_or(0, |(lo, hi)| 0.clamp(lo, hi));
                model.set(s.name.clone(), v);
            }
        }
        let (outcome, trace) = execute_traced(self.program, &model, path.len() as u64 + 1)
            .unwrap_or_else(|e| panic!("witness {model} failed to replay: {e}"));
        assert!(
            trace.len() >= path.len() && trace[..path.len()] == path[..],
            "witness {model} replays along a different path"
        );
        let point = self.nodes[id].point;
        match outcome {
            ConcreteOutcome::HitError { point: hit, .. } => {
                assert_eq!(hit, point, "witness {model} hits a different error")
            }
            ConcreteOutcome::HitHalt { store } => {
                let m: Model = store.into_iter().collect();
                assert_eq!(
                    self.program.safety().eval(&m).ok(),
                    Some(false),
                    "witness {model} halts in a safe state"
                );
            }
            other => panic!("witness {model} does not reach the error: {other:?}"),
        }
        Some((model, path))
    }
}
