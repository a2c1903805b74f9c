//! Deterministic execution of an elaborated architecture. Messages buffer in
//! per-port FIFO queues; a single global FIFO of dispatch tickets decides
//! which queued message is processed next, one per step; emissions are
//! routed the moment a handler produces them. The same inputs always
//! reproduce the same trace, byte for byte.

use std::collections::VecDeque;

use indexmap::IndexMap;
use serde::Serialize;

use crate::arch::{Dest, ElaboratedArchitecture, PortLoc};
use crate::behavior::{self, RuntimeFault, RuntimeValue};
use crate::diag::{self, Diagnostic};
use crate::sema::{is_subtype, typecheck, CheckedModel, CompKind};
use crate::syntax::ast::Direction;
use crate::syntax::Stimulus;

pub const DEFAULT_MAX_STEPS: usize = 10000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verbosity {
    /// Only what crosses the system boundary: injections and system outputs.
    Boundary,
    /// Every event, including deliveries, firings, emissions, and drops.
    Full,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_steps: usize,
    pub verbosity: Verbosity,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_steps: DEFAULT_MAX_STEPS,
            verbosity: Verbosity::Boundary,
        }
    }
}

/// One trace event; serialized as a single JSON line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceLine {
    pub step: usize,
    pub kind: String,
    pub instance: Vec<String>,
    pub port: String,
    pub value: serde_json::Value,
}

fn ev(step: usize, kind: &str, instance: &[String], port: &str, value: &RuntimeValue) -> TraceLine {
    TraceLine {
        step,
        kind: kind.to_string(),
        instance: instance.to_vec(),
        port: port.to_string(),
        value: value.to_json(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// The step budget ran out with messages still queued.
    Divergence {
        steps: usize,
    },
    Fault(RuntimeFault),
}

/// The complete run-time state of one architecture plus its event trace.
pub struct Simulator<'a> {
    model: &'a CheckedModel,
    ea: &'a ElaboratedArchitecture,
    /// Behavioral instance path -> state variable values.
    states: IndexMap<Vec<String>, IndexMap<String, RuntimeValue>>,
    /// One FIFO per behavioral in-port.
    queues: IndexMap<PortLoc, VecDeque<RuntimeValue>>,
    /// Dispatch tickets, one per queued message, oldest first.
    run_queue: VecDeque<PortLoc>,
    step_count: usize,
    trace: Vec<TraceLine>,
}

impl<'a> Simulator<'a> {
    /// Instantiate every behavioral component with its initial state and
    /// empty queues.
    pub fn new(model: &'a CheckedModel, ea: &'a ElaboratedArchitecture) -> Self {
        let mut states = IndexMap::new();
        let mut queues = IndexMap::new();
        for node in &ea.instances {
            if node.kind != CompKind::Behavioral {
                continue;
            }
            let rc = model
                .component(&node.type_name)
                .expect("instances reference declared components");
            states.insert(node.path.clone(), behavior::initial_state(rc));
            for p in rc.in_ports() {
                queues.insert(PortLoc::new(&node.path, &p.name), VecDeque::new());
            }
        }
        Simulator {
            model,
            ea,
            states,
            queues,
            run_queue: VecDeque::new(),
            step_count: 0,
            trace: Vec::new(),
        }
    }

    pub fn state_of(&self, path: &[String]) -> Option<&IndexMap<String, RuntimeValue>> {
        self.states.get(path)
    }

    pub fn queue_count(&self) -> usize {
        self.queues.len()
    }

    pub fn queued_messages(&self) -> usize {
        self.queues.values().map(VecDeque::len).sum()
    }

    pub fn is_quiescent(&self) -> bool {
        self.run_queue.is_empty()
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn trace(&self) -> &[TraceLine] {
        &self.trace
    }

    fn route(&mut self, origin: &PortLoc, value: &RuntimeValue, step: usize) {
        let dests = self.ea.routing.destinations(origin).to_vec();
        for d in dests {
            match d {
                Dest::LeafIn(loc) => {
                    self.trace
                        .push(ev(step, "deliver", &loc.instance, &loc.port, value));
                    self.queues
                        .get_mut(&loc)
                        .expect("routing destinations are instantiated in-ports")
                        .push_back(value.clone());
                    self.run_queue.push_back(loc);
                }
                Dest::SystemOut(port) => {
                    self.trace.push(ev(step, "system_out", &[], &port, value));
                }
            }
        }
    }

    /// Feed one stimulus into a root in-port and deliver it everywhere the
    /// routing table says it goes.
    pub fn inject(&mut self, port: &str, value: RuntimeValue) {
        self.trace
            .push(ev(self.step_count, "inject", &[], port, &value));
        let origin = PortLoc::new(&[], port);
        self.route(&origin, &value, self.step_count);
    }

    /// Process the oldest queued message: fire its handler (routing any
    /// emissions immediately, in program order) or drop it when the owning
    /// component declares no handler for that port.
    pub fn step(&mut self) -> Result<(), RuntimeFault> {
        let ticket = self
            .run_queue
            .pop_front()
            .expect("step requires a nonempty run queue");
        let value = self
            .queues
            .get_mut(&ticket)
            .expect("tickets reference known queues")
            .pop_front()
            .expect("every ticket has a queued message");
        self.step_count += 1;
        let step = self.step_count;
        let model = self.model;
        let node = self
            .ea
            .instances
            .iter()
            .find(|n| n.path == ticket.instance)
            .expect("tickets reference instantiated components");
        let rc = model
            .component(&node.type_name)
            .expect("instances reference declared components");
        match rc.handler_for(&ticket.port) {
            Some(bound) => {
                self.trace
                    .push(ev(step, "fire", &ticket.instance, &ticket.port, &value));
                let state = self
                    .states
                    .get(&ticket.instance)
                    .expect("behavioral instances have state maps");
                let (next, emissions) = behavior::exec_handler(&bound.decl, state, &value)?;
                self.states.insert(ticket.instance.clone(), next);
                for em in emissions {
                    self.trace
                        .push(ev(step, "emit", &ticket.instance, &em.port, &em.value));
                    let origin = PortLoc::new(&ticket.instance, &em.port);
                    self.route(&origin, &em.value, step);
                }
            }
            None => {
                self.trace
                    .push(ev(step, "drop", &ticket.instance, &ticket.port, &value));
            }
        }
        Ok(())
    }

    /// Step until quiescence, respecting the global step budget. The budget
    /// check runs before each step, so a run with `max_steps = n` never
    /// processes more than `n` messages.
    fn drain(&mut self, cfg: &RunConfig) -> Result<(), RunError> {
        while !self.run_queue.is_empty() {
            if self.step_count >= cfg.max_steps {
                return Err(RunError::Divergence {
                    steps: self.step_count,
                });
            }
            self.step().map_err(RunError::Fault)?;
        }
        Ok(())
    }

    /// Inject each stimulus in order, running the system to quiescence
    /// between injections. On error the trace holds everything recorded up
    /// to the failure.
    pub fn run(
        &mut self,
        stimuli: &[(String, RuntimeValue)],
        cfg: &RunConfig,
    ) -> Result<(), RunError> {
        for (port, value) in stimuli {
            self.inject(port, value.clone());
            self.drain(cfg)?;
        }
        Ok(())
    }
}

/// Serialize a trace as one JSON object per line, honoring the verbosity
/// filter.
pub fn render_trace(trace: &[TraceLine], verbosity: Verbosity) -> String {
    let mut out = String::new();
    for line in trace {
        if verbosity == Verbosity::Boundary && line.kind != "inject" && line.kind != "system_out" {
            continue;
        }
        out.push_str(&serde_json::to_string(line).expect("trace serialization cannot fail"));
        out.push('\n');
    }
    out
}

/// Validate parsed stimuli against the root component: each must name a root
/// in-port and carry a value whose type may arrive there. Returns the
/// injection-ready list.
pub fn prepare_stimuli(
    stimuli: &[Stimulus],
    model: &CheckedModel,
    root_type: &str,
) -> Result<Vec<(String, RuntimeValue)>, Vec<Diagnostic>> {
    let rc = model
        .component(root_type)
        .expect("caller resolves the root component first");
    let mut diags = Vec::new();
    let mut prepared = Vec::new();
    for stim in stimuli {
        let port = match rc.port(&stim.port) {
            Some(p) if p.direction == Direction::In => p,
            _ => {
                diags.push(Diagnostic::error(
                    diag::E0211,
                    stim.pos.clone(),
                    format!(
                        "root component `{root_type}` has no in-port named `{}`",
                        stim.port
                    ),
                ));
                continue;
            }
        };
        let Some(ty) = typecheck::literal_type(&stim.value, &model.symbols, &mut diags) else {
            continue;
        };
        if !is_subtype(&ty, &port.ty) {
            diags.push(Diagnostic::error(
                diag::E0209,
                stim.pos.clone(),
                format!(
                    "stimulus value of type `{ty}` cannot arrive at port `{}` of type `{}`",
                    stim.port, port.ty
                ),
            ));
            continue;
        }
        let value = behavior::literal_value(&stim.value)
            .expect("typed literals always convert to runtime values");
        prepared.push((stim.port.clone(), value));
    }
    if diags.is_empty() {
        Ok(prepared)
    } else {
        diag::sort_diagnostics(&mut diags);
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arch::elaborate;
    use crate::sema::analyze;
    use crate::syntax::{parse_model, parse_stimulus};

    const MACHINE: &str = include_str!("../tests/fixtures/coffee/machine.arc");
    const CPU: &str = include_str!("../tests/fixtures/coffee/cpu.arc");
    const STUBS: &str = include_str!("../tests/fixtures/coffee/stubs.arc");
    const MILK_STIM: &str = include_str!("../tests/fixtures/coffee/milk.stim");

    fn check(sources: &[(&str, &str)]) -> CheckedModel {
        let units: Vec<_> = sources
            .iter()
            .map(|(file, src)| parse_model(src, file).expect("fixture parses"))
            .collect();
        analyze(&units).expect("fixture passes semantic checks")
    }

    fn coffee() -> CheckedModel {
        check(&[
            ("machine.arc", MACHINE),
            ("cpu.arc", CPU),
            ("stubs.arc", STUBS),
        ])
    }

    fn kinds_of(trace: &[TraceLine]) -> Vec<(usize, String)> {
        trace.iter().map(|t| (t.step, t.kind.clone())).collect()
    }

    #[test]
    fn instantiation_builds_queues_and_defaults() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let sim = Simulator::new(&model, &ea);
        // cpu has four in-ports, display one; the sensors have none.
        assert_eq!(sim.queue_count(), 5);
        assert_eq!(sim.queued_messages(), 0);
        assert!(sim.is_quiescent());
        let cpu = vec!["cpu".to_string()];
        assert_eq!(
            sim.state_of(&cpu).unwrap().get("milkAvailable"),
            Some(&RuntimeValue::Bool(false))
        );
        assert!(sim.state_of(&["display".to_string()]).unwrap().is_empty());
    }

    #[test]
    fn explicit_initializer_respected() {
        let model = check(&[(
            "t.arc",
            "component T {\n  port in Boolean t;\n  state Integer n = 5;\n\
             \n  handler onTReceived(Boolean t) { }\n}\n",
        )]);
        let ea = elaborate("T", &model).unwrap();
        let sim = Simulator::new(&model, &ea);
        assert_eq!(
            sim.state_of(&[]).unwrap().get("n"),
            Some(&RuntimeValue::Int(5))
        );
    }

    #[test]
    fn inject_delivers_and_queues_one_ticket() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.inject("milkEmpty", RuntimeValue::Bool(true));
        assert_eq!(sim.queued_messages(), 1);
        assert!(!sim.is_quiescent());
        assert_eq!(
            kinds_of(sim.trace()),
            vec![(0, "inject".to_string()), (0, "deliver".to_string())]
        );
        assert_eq!(sim.trace()[1].instance, vec!["cpu".to_string()]);
        assert_eq!(sim.trace()[1].port, "milkEmpty");
    }

    #[test]
    fn pass_through_produces_system_out_without_tickets() {
        let model = check(&[(
            "w.arc",
            "component Wire {\n  port in Integer feed;\n  port out Integer drain;\n\
             \n  connect feed -> drain;\n}\n",
        )]);
        let ea = elaborate("Wire", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.inject("feed", RuntimeValue::Int(42));
        assert!(sim.is_quiescent());
        assert_eq!(
            kinds_of(sim.trace()),
            vec![(0, "inject".to_string()), (0, "system_out".to_string())]
        );
        assert_eq!(sim.trace()[1].value, serde_json::json!(42));
    }

    #[test]
    fn coffee_full_trace_is_exact() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        let stimuli = prepare_stimuli(
            &parse_stimulus(MILK_STIM, "milk.stim").unwrap(),
            &model,
            "CoffeeMachine",
        )
        .unwrap();
        sim.run(&stimuli, &RunConfig::default()).unwrap();

        let rendered = render_trace(sim.trace(), Verbosity::Full);
        let expected = concat!(
            "{\"step\":0,\"kind\":\"inject\",\"instance\":[],\"port\":\"milkEmpty\",\"value\":true}\n",
            "{\"step\":0,\"kind\":\"deliver\",\"instance\":[\"cpu\"],\"port\":\"milkEmpty\",\"value\":true}\n",
            "{\"step\":1,\"kind\":\"fire\",\"instance\":[\"cpu\"],\"port\":\"milkEmpty\",\"value\":true}\n",
            "{\"step\":1,\"kind\":\"emit\",\"instance\":[\"cpu\"],\"port\":\"message\",\"value\":\"Sorry, no milk today.\"}\n",
            "{\"step\":1,\"kind\":\"deliver\",\"instance\":[\"display\"],\"port\":\"message\",\"value\":\"Sorry, no milk today.\"}\n",
            "{\"step\":2,\"kind\":\"drop\",\"instance\":[\"display\"],\"port\":\"message\",\"value\":\"Sorry, no milk today.\"}\n",
            "{\"step\":2,\"kind\":\"inject\",\"instance\":[],\"port\":\"milkEmpty\",\"value\":false}\n",
            "{\"step\":2,\"kind\":\"deliver\",\"instance\":[\"cpu\"],\"port\":\"milkEmpty\",\"value\":false}\n",
            "{\"step\":3,\"kind\":\"fire\",\"instance\":[\"cpu\"],\"port\":\"milkEmpty\",\"value\":false}\n",
            "{\"step\":3,\"kind\":\"emit\",\"instance\":[\"cpu\"],\"port\":\"message\",\"value\":\"Got milk!\"}\n",
            "{\"step\":3,\"kind\":\"deliver\",\"instance\":[\"display\"],\"port\":\"message\",\"value\":\"Got milk!\"}\n",
            "{\"step\":4,\"kind\":\"drop\",\"instance\":[\"display\"],\"port\":\"message\",\"value\":\"Got milk!\"}\n",
        );
        assert_eq!(rendered, expected);

        // The display stub saw exactly the two expected messages, in order.
        let display_msgs: Vec<_> = sim
            .trace()
            .iter()
            .filter(|t| t.kind == "deliver" && t.instance == vec!["display".to_string()])
            .map(|t| t.value.clone())
            .collect();
        assert_eq!(
            display_msgs,
            vec![
                serde_json::json!("Sorry, no milk today."),
                serde_json::json!("Got milk!"),
            ]
        );
        // And the CPU remembers the last report.
        assert_eq!(
            sim.state_of(&["cpu".to_string()])
                .unwrap()
                .get("milkAvailable"),
            Some(&RuntimeValue::Bool(true))
        );
        assert!(sim.is_quiescent());
        assert_eq!(sim.queued_messages(), 0);
    }

    #[test]
    fn boundary_verbosity_hides_internal_events() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.run(
            &[("milkEmpty".to_string(), RuntimeValue::Bool(true))],
            &RunConfig::default(),
        )
        .unwrap();
        let rendered = render_trace(sim.trace(), Verbosity::Boundary);
        assert_eq!(
            rendered,
            "{\"step\":0,\"kind\":\"inject\",\"instance\":[],\"port\":\"milkEmpty\",\"value\":true}\n"
        );
    }

    #[test]
    fn empty_stimulus_list_is_quiescent() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.run(&[], &RunConfig::default()).unwrap();
        assert!(sim.trace().is_empty());
        assert!(sim.is_quiescent());
        assert_eq!(sim.step_count(), 0);
    }

    #[test]
    fn echo_loop_diverges_with_exact_budget() {
        let model = check(&[(
            "echo.arc",
            "component EchoLoop {\n  component Echo echo;\n  port in Boolean kick;\n\
             \n  connect kick -> echo.pulse;\n  connect echo.echoed -> echo.pulse2;\n}\n\
             component Echo {\n  port in Boolean pulse;\n  port in Boolean pulse2;\n\
             \n  port out Boolean echoed;\n\
             \n  handler onPulseReceived(Boolean pulse) { this.echoed.send(pulse); }\n\
             \n  handler onPulse2Received(Boolean pulse2) { this.echoed.send(pulse2); }\n}\n",
        )]);
        let ea = elaborate("EchoLoop", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        let cfg = RunConfig {
            max_steps: 10,
            verbosity: Verbosity::Full,
        };
        let err = sim
            .run(&[("kick".to_string(), RuntimeValue::Bool(true))], &cfg)
            .unwrap_err();
        assert_eq!(err, RunError::Divergence { steps: 10 });
        assert_eq!(sim.step_count(), 10);
        let fires = sim.trace().iter().filter(|t| t.kind == "fire").count();
        assert_eq!(fires, 10, "exactly max_steps messages were processed");
        assert!(!sim.is_quiescent());
    }

    #[test]
    fn runtime_fault_aborts_with_partial_trace() {
        let model = check(&[(
            "d.arc",
            "component Divider {\n  port in Integer x;\n  port out Integer y;\n\
             \n  handler onXReceived(Integer x) { this.y.send(10 / x); }\n}\n",
        )]);
        let ea = elaborate("Divider", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        let err = sim
            .run(
                &[("x".to_string(), RuntimeValue::Int(0))],
                &RunConfig::default(),
            )
            .unwrap_err();
        let RunError::Fault(fault) = err else {
            panic!("expected a runtime fault");
        };
        assert!(fault.message.contains("division by zero"));
        let kinds: Vec<_> = sim.trace().iter().map(|t| t.kind.as_str()).collect();
        assert_eq!(kinds, vec!["inject", "deliver", "fire"]);
    }

    #[test]
    fn behavioral_root_handles_its_own_input() {
        let model = check(&[(
            "d.arc",
            "component Doubler {\n  port in Integer x;\n  port out Integer y;\n\
             \n  handler onXReceived(Integer x) { this.y.send(x * 2); }\n}\n",
        )]);
        let ea = elaborate("Doubler", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.run(
            &[("x".to_string(), RuntimeValue::Int(21))],
            &RunConfig::default(),
        )
        .unwrap();
        let outs: Vec<_> = sim
            .trace()
            .iter()
            .filter(|t| t.kind == "system_out")
            .map(|t| t.value.clone())
            .collect();
        assert_eq!(outs, vec![serde_json::json!(42)]);
    }

    #[test]
    fn trace_prefix_stable_under_truncated_stimuli() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let both = [
            ("milkEmpty".to_string(), RuntimeValue::Bool(true)),
            ("milkEmpty".to_string(), RuntimeValue::Bool(false)),
        ];
        let mut sim_both = Simulator::new(&model, &ea);
        sim_both.run(&both, &RunConfig::default()).unwrap();
        let mut sim_one = Simulator::new(&model, &ea);
        sim_one.run(&both[..1], &RunConfig::default()).unwrap();
        assert_eq!(&sim_both.trace()[..sim_one.trace().len()], sim_one.trace());
    }

    #[test]
    fn conservation_of_messages() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.run(
            &[
                ("milkEmpty".to_string(), RuntimeValue::Bool(true)),
                (
                    "selection".to_string(),
                    RuntimeValue::EnumVal {
                        ty: "CoffeeType".to_string(),
                        member: "Espresso".to_string(),
                    },
                ),
            ],
            &RunConfig::default(),
        )
        .unwrap();
        let delivers = sim.trace().iter().filter(|t| t.kind == "deliver").count();
        let fires = sim.trace().iter().filter(|t| t.kind == "fire").count();
        let drops = sim.trace().iter().filter(|t| t.kind == "drop").count();
        assert_eq!(delivers, fires + drops + sim.queued_messages());
    }

    #[test]
    fn stimulus_validation_catches_bad_inputs() {
        let model = coffee();
        let stims =
            parse_stimulus("noSuchPort true\nmilkEmpty 3\nmilkAmount 1\n", "bad.stim").unwrap();
        let errs = prepare_stimuli(&stims, &model, "CoffeeMachine").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(errs.iter().all(|d| d.code == "E0211" || d.code == "E0209"));
        // Out-ports are not injectable.
        assert!(errs
            .iter()
            .any(|d| d.code == "E0211" && d.message.contains("`milkAmount`")));
        assert_eq!(errs[0].pos.line, 1);
    }

    #[test]
    fn enum_stimulus_accepted_and_traced() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let stims = parse_stimulus("selection CoffeeType.Espresso\n", "sel.stim").unwrap();
        let prepared = prepare_stimuli(&stims, &model, "CoffeeMachine").unwrap();
        let mut sim = Simulator::new(&model, &ea);
        sim.run(&prepared, &RunConfig::default()).unwrap();
        assert_eq!(
            sim.trace()[0].value,
            serde_json::json!({"enum": "CoffeeType", "member": "Espresso"})
        );
        // The CPU has no selection handler in this fixture: the message is
        // dropped, deterministically.
        assert_eq!(sim.trace().last().unwrap().kind, "drop");
    }

    #[test]
    fn identical_runs_produce_identical_bytes() {
        let model = coffee();
        let ea = elaborate("CoffeeMachine", &model).unwrap();
        let stimuli = [
            ("milkEmpty".to_string(), RuntimeValue::Bool(true)),
            ("milkEmpty".to_string(), RuntimeValue::Bool(false)),
        ];
        let mut a = Simulator::new(&model, &ea);
        a.run(&stimuli, &RunConfig::default()).unwrap();
        let mut b = Simulator::new(&model, &ea);
        b.run(&stimuli, &RunConfig::default()).unwrap();
        assert_eq!(
            render_trace(a.trace(), Verbosity::Full),
            render_trace(b.trace(), Verbosity::Full)
        );
    }
}
