//! The chat-backed policy: builds prompts for each decision kind, parses the
//! structured response, and retries malformed output with the parse error in
//! the prompt's feedback slot. Retries never consume world-model queries.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::pddl::{applicable_actions, GroundAction, GroundedProblem, State};
use crate::policy::{
    ActionProposer, HistoryEntry, InteractionHistory, PlanGenerator, PolicyDiagnostics,
    PolicyError, PolicyInfo, ProposalRequest, QuerySelector, Rating, Reactor, StateEvaluator,
    WorldContext,
};

use super::{
    build_prompt, build_translation_prompt, parse_action_sequence, parse_actions_line,
    parse_rating, parse_selection, LlmClient, PromptInputs, PromptKind, TranslationKind,
};

#[derive(Debug, Clone)]
pub struct LlmPolicyConfig {
    /// Prompt used by `generate_plan` (the replanning kind or a single-shot
    /// variant).
    pub plan_kind: PromptKind,
    /// Prompt used by `next_action`.
    pub react_kind: PromptKind,
    /// Malformed-output retries per policy call.
    pub max_retries: u32,
    /// Translate states to natural language through the model (one cached
    /// call per distinct state) instead of using raw predicate text.
    pub translate_states: bool,
    /// Character cap on rendered history; oldest entries drop first and the
    /// run is flagged as truncated.
    pub history_char_cap: Option<usize>,
    /// Optional fixed in-context example block; none by default.
    pub in_context_example: Option<String>,
}

impl Default for LlmPolicyConfig {
    fn default() -> Self {
        LlmPolicyConfig {
            plan_kind: PromptKind::BoomerangPlan,
            react_kind: PromptKind::ReactStep,
            max_retries: 3,
            translate_states: false,
            history_char_cap: None,
            in_context_example: None,
        }
    }
}

pub struct LlmPolicy {
    client: Rc<RefCell<LlmClient>>,
    grounded: GroundedProblem,
    config: LlmPolicyConfig,
    state_texts: HashMap<State, String>,
    goal_text: Option<String>,
    llm_calls: u64,
    prompt_tokens: u64,
    completion_tokens: u64,
    malformed_actions: u64,
    history_truncated: bool,
}

impl LlmPolicy {
    pub fn new(
        client: Rc<RefCell<LlmClient>>,
        grounded: &GroundedProblem,
        config: LlmPolicyConfig,
    ) -> Self {
        LlmPolicy {
            client,
            grounded: grounded.clone(),
            config,
            state_texts: HashMap::new(),
            goal_text: None,
            llm_calls: 0,
            prompt_tokens: 0,
            completion_tokens: 0,
            malformed_actions: 0,
            history_truncated: false,
        }
    }

    fn exchange(&mut self, system: &str, user: &str) -> Result<String, PolicyError> {
        let exchange = self
            .client
            .borrow_mut()
            .complete(system, user)
            .map_err(|e| PolicyError::failure(format!("llm call failed: {e}")))?;
        self.llm_calls += 1;
        self.prompt_tokens += exchange.prompt_tokens;
        self.completion_tokens += exchange.completion_tokens;
        Ok(exchange.response_text)
    }

    /// Text for a state: either a cached model translation or the raw typed
    /// predicate list. Translation calls count as LLM calls, never as WMQs.
    fn state_text(&mut self, state: &State, ctx: &WorldContext) -> Result<String, PolicyError> {
        if let Some(hit) = self.state_texts.get(state) {
            return Ok(hit.clone());
        }
        let text = if self.config.translate_states {
            let predicates = state.typed_atoms().join(", ");
            let objects = self
                .grounded
                .problem
                .objects
                .iter()
                .map(|(name, ty)| format!("{name}:{ty}"))
                .collect::<Vec<_>>()
                .join(", ");
            let (system, user) = build_translation_prompt(
                TranslationKind::StateAtoms,
                ctx,
                &predicates,
                Some(&objects),
            );
            self.exchange(&system, &user)?
        } else {
            state.typed_atoms().join(", ")
        };
        self.state_texts.insert(state.clone(), text.clone());
        Ok(text)
    }

    fn goal_text(&mut self, ctx: &WorldContext) -> Result<String, PolicyError> {
        if let Some(hit) = &self.goal_text {
            return Ok(hit.clone());
        }
        let goal = self.grounded.problem.goal.clone();
        let text = if self.config.translate_states {
            let predicates = goal.typed_atoms().join(", ");
            let (system, user) =
                build_translation_prompt(TranslationKind::Goal, ctx, &predicates, None);
            self.exchange(&system, &user)?
        } else {
            goal.typed_atoms().join(", ")
        };
        self.goal_text = Some(text.clone());
        Ok(text)
    }

    fn display_names(actions: &[GroundAction]) -> Vec<String> {
        actions.iter().map(|a| a.display_name.clone()).collect()
    }

    /// Render history blocks newest-last, dropping oldest blocks past the
    /// configured character cap.
    fn cap_blocks(&mut self, mut blocks: Vec<String>) -> Option<String> {
        if blocks.is_empty() {
            return None;
        }
        if let Some(cap) = self.config.history_char_cap {
            let total = |blocks: &[String]| blocks.iter().map(|b| b.len() + 1).sum::<usize>();
            while blocks.len() > 1 && total(&blocks) > cap {
                blocks.remove(0);
                self.history_truncated = true;
            }
        }
        Some(blocks.join("\n"))
    }

    fn render_plan_history(
        &mut self,
        history: &InteractionHistory,
        ctx: &WorldContext,
    ) -> Result<Option<String>, PolicyError> {
        let mut blocks = Vec::new();
        for (i, entry) in history.entries().iter().enumerate() {
            match entry {
                HistoryEntry::PlanAttempt {
                    trajectory, error, ..
                } => {
                    let mut block = format!("Attempt {}:", i + 1);
                    for (j, action) in trajectory.actions.iter().enumerate() {
                        let text = self.state_text(&trajectory.states[j + 1], ctx)?;
                        block.push_str(&format!("\n{}: {}", action.display_name, text));
                    }
                    block.push_str(&format!("\nError: {}", error.detail));
                    blocks.push(block);
                }
                HistoryEntry::Query { .. } | HistoryEntry::Reflection { .. } => {}
            }
        }
        Ok(self.cap_blocks(blocks))
    }

    fn render_query_history(
        &mut self,
        history: &InteractionHistory,
        ctx: &WorldContext,
    ) -> Result<Option<String>, PolicyError> {
        let mut blocks = Vec::new();
        let mut n = 0;
        for entry in history.entries() {
            match entry {
                HistoryEntry::Query {
                    state,
                    action,
                    next_state,
                    error,
                } => {
                    n += 1;
                    let state_text = self.state_text(state, ctx)?;
                    let result = match (next_state, error) {
                        (Some(next), _) => self.state_text(next, ctx)?,
                        (None, Some(feedback)) => feedback.detail.clone(),
                        (None, None) => "no result".to_string(),
                    };
                    blocks.push(format!(
                        "Query {n}:\nState: {state_text}\nAction: {}\nResult: {result}",
                        action.display_name
                    ));
                }
                HistoryEntry::Reflection { note } => blocks.push(format!("Note: {note}")),
                HistoryEntry::PlanAttempt { .. } => {}
            }
        }
        Ok(self.cap_blocks(blocks))
    }

    fn render_visited(
        &mut self,
        visited: &[State],
        ctx: &WorldContext,
    ) -> Result<String, PolicyError> {
        let mut blocks = Vec::new();
        for (i, state) in visited.iter().enumerate() {
            let text = self.state_text(state, ctx)?;
            let valid = applicable_actions(state, &self.grounded.actions);
            let mut block = format!("State {i}:\n{text}\nValid Actions:");
            for action in valid {
                block.push_str(&format!("\n- {}", action.display_name));
            }
            blocks.push(block);
        }
        Ok(blocks.join("\n"))
    }

    fn note_malformed(&mut self) {
        self.malformed_actions += 1;
    }
}

impl PolicyInfo for LlmPolicy {
    fn diagnostics(&self) -> PolicyDiagnostics {
        PolicyDiagnostics {
            llm_calls: self.llm_calls,
            prompt_tokens: self.prompt_tokens,
            completion_tokens: self.completion_tokens,
            malformed_actions: self.malformed_actions,
            history_truncated: self.history_truncated,
        }
    }
}

impl ActionProposer for LlmPolicy {
    fn propose_actions(
        &mut self,
        req: &ProposalRequest,
        ctx: &WorldContext,
    ) -> Result<Vec<GroundAction>, PolicyError> {
        let state_text = self.state_text(&req.state, ctx)?;
        let goal_text = self.goal_text(ctx)?;
        let valid_names = Self::display_names(&req.valid_actions);
        let expected = req.k.min(req.valid_actions.len());
        let example = self.config.in_context_example.clone();
        let mut feedback = req.feedback.clone();
        let mut last_error = String::new();
        for _ in 0..=self.config.max_retries {
            let inputs = PromptInputs {
                state_text: Some(&state_text),
                goal_text: Some(&goal_text),
                valid_actions: Some(&valid_names),
                history_text: None,
                feedback: feedback.as_deref(),
                k: Some(req.k),
                example: example.as_deref(),
            };
            let (system, user) = build_prompt(PromptKind::ToiPropose, ctx, &inputs)
                .map_err(|e| PolicyError::failure(e.to_string()))?;
            let response = self.exchange(&system, &user)?;
            match parse_actions_line(&response, &self.grounded.actions) {
                Ok(actions) => {
                    let mut seen = std::collections::HashSet::new();
                    let duplicate = actions.iter().any(|a| !seen.insert(a.display_name.clone()));
                    let outside = actions
                        .iter()
                        .find(|a| !req.valid_actions.iter().any(|v| v == *a));
                    if duplicate {
                        last_error = "the proposed actions were not distinct".to_string();
                    } else if let Some(bad) = outside {
                        last_error = format!(
                            "the proposed action {} is not in the valid actions",
                            bad.display_name
                        );
                    } else if actions.len() != expected {
                        last_error = format!(
                            "the sequence of actions did not include the specified number of actions: expected {expected}, got {}",
                            actions.len()
                        );
                    } else {
                        return Ok(actions);
                    }
                }
                Err(e) => last_error = e.to_string(),
            }
            self.note_malformed();
            feedback = Some(last_error.clone());
        }
        Err(PolicyError::failure(format!(
            "proposal retries exhausted: {last_error}"
        )))
    }
}

impl StateEvaluator for LlmPolicy {
    fn evaluate_state(
        &mut self,
        state: &State,
        _goal: &State,
        ctx: &WorldContext,
    ) -> Result<Rating, PolicyError> {
        let state_text = self.state_text(state, ctx)?;
        let goal_text = self.goal_text(ctx)?;
        let example = self.config.in_context_example.clone();
        let mut feedback: Option<String> = None;
        let mut last_error = String::new();
        for _ in 0..=self.config.max_retries {
            let inputs = PromptInputs {
                state_text: Some(&state_text),
                goal_text: Some(&goal_text),
                feedback: feedback.as_deref(),
                example: example.as_deref(),
                ..Default::default()
            };
            let (system, user) = build_prompt(PromptKind::ToiEvaluate, ctx, &inputs)
                .map_err(|e| PolicyError::failure(e.to_string()))?;
            let response = self.exchange(&system, &user)?;
            match parse_rating(&response) {
                Ok(rating) => return Ok(rating),
                Err(e) => {
                    last_error = e.to_string();
                    self.note_malformed();
                    feedback = Some(format!(
                        "the evaluation you provided was not formatted correctly: {last_error}"
                    ));
                }
            }
        }
        Err(PolicyError::failure(format!(
            "evaluation retries exhausted: {last_error}"
        )))
    }
}

impl PlanGenerator for LlmPolicy {
    fn generate_plan(
        &mut self,
        start: &State,
        ctx: &WorldContext,
        history: &InteractionHistory,
        valid_at_start: &[GroundAction],
    ) -> Result<Vec<GroundAction>, PolicyError> {
        let state_text = self.state_text(start, ctx)?;
        let goal_text = self.goal_text(ctx)?;
        let valid_names = Self::display_names(valid_at_start);
        let history_text = match self.config.plan_kind {
            PromptKind::BoomerangPlan => self.render_plan_history(history, ctx)?,
            _ => None,
        };
        let example = self.config.in_context_example.clone();
        let mut feedback: Option<String> = history.last_error().map(|e| e.detail.clone());
        let mut last_error = String::new();
        for _ in 0..=self.config.max_retries {
            let inputs = PromptInputs {
                state_text: Some(&state_text),
                goal_text: Some(&goal_text),
                valid_actions: Some(&valid_names),
                history_text: history_text.as_deref(),
                feedback: feedback.as_deref(),
                k: None,
                example: example.as_deref(),
            };
            let (system, user) = build_prompt(self.config.plan_kind, ctx, &inputs)
                .map_err(|e| PolicyError::failure(e.to_string()))?;
            let response = self.exchange(&system, &user)?;
            match parse_action_sequence(&response, &self.grounded.actions) {
                Ok(plan) => return Ok(plan),
                Err(e) => {
                    last_error = e.to_string();
                    self.note_malformed();
                    feedback = Some(last_error.clone());
                }
            }
        }
        Err(PolicyError::failure(format!(
            "plan retries exhausted: {last_error}"
        )))
    }
}

impl Reactor for LlmPolicy {
    fn next_action(
        &mut self,
        state: &State,
        ctx: &WorldContext,
        history: &InteractionHistory,
    ) -> Result<GroundAction, PolicyError> {
        let state_text = self.state_text(state, ctx)?;
        let goal_text = self.goal_text(ctx)?;
        let valid: Vec<GroundAction> = applicable_actions(state, &self.grounded.actions)
            .into_iter()
            .cloned()
            .collect();
        let valid_names = Self::display_names(&valid);
        let history_text = self.render_query_history(history, ctx)?;
        let example = self.config.in_context_example.clone();
        let mut feedback: Option<String> = history.last_error().map(|e| e.detail.clone());
        let mut last_error = String::new();
        for _ in 0..=self.config.max_retries {
            let inputs = PromptInputs {
                state_text: Some(&state_text),
                goal_text: Some(&goal_text),
                valid_actions: Some(&valid_names),
                history_text: history_text.as_deref(),
                feedback: feedback.as_deref(),
                k: None,
                example: example.as_deref(),
            };
            let (system, user) = build_prompt(self.config.react_kind, ctx, &inputs)
                .map_err(|e| PolicyError::failure(e.to_string()))?;
            let response = self.exchange(&system, &user)?;
            match parse_actions_line(&response, &self.grounded.actions) {
                Ok(actions) => return Ok(actions[0].clone()),
                Err(e) => {
                    last_error = e.to_string();
                    self.note_malformed();
                    feedback = Some(last_error.clone());
                }
            }
        }
        Err(PolicyError::failure(format!(
            "action retries exhausted: {last_error}"
        )))
    }
}

impl QuerySelector for LlmPolicy {
    fn select_query(
        &mut self,
        ctx: &WorldContext,
        _history: &InteractionHistory,
        visited: &[State],
    ) -> Result<(usize, GroundAction), PolicyError> {
        let goal_text = self.goal_text(ctx)?;
        let visited_text = self.render_visited(visited, ctx)?;
        let example = self.config.in_context_example.clone();
        let mut feedback: Option<String> = None;
        let mut last_error = String::new();
        for _ in 0..=self.config.max_retries {
            let inputs = PromptInputs {
                goal_text: Some(&goal_text),
                history_text: Some(&visited_text),
                feedback: feedback.as_deref(),
                example: example.as_deref(),
                ..Default::default()
            };
            let (system, user) = build_prompt(PromptKind::ReactSelect, ctx, &inputs)
                .map_err(|e| PolicyError::failure(e.to_string()))?;
            let response = self.exchange(&system, &user)?;
            match parse_selection(&response, &self.grounded.actions) {
                Ok((idx, action)) => {
                    if idx < visited.len() {
                        return Ok((idx, action));
                    }
                    last_error = format!(
                        "the state index you selected was out of range: {idx} selected, {} states visited",
                        visited.len()
                    );
                }
                Err(e) => last_error = e.to_string(),
            }
            self.note_malformed();
            feedback = Some(last_error.clone());
        }
        Err(PolicyError::failure(format!(
            "selection retries exhausted: {last_error}"
        )))
    }
}
