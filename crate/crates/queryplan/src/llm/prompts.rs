//! Checked-in prompt templates and byte-deterministic prompt assembly.
//!
//! Every planner-facing prompt has a fixed skeleton (the instructions and
//! response format) and an instance block (state text, goal text, valid
//! actions, history, feedback). The skeleton carries the response markers the
//! parsers scan for: `Action Sequence:`, `Actions:`, `Rating:`, `Selection:`.

use crate::policy::WorldContext;

use super::LlmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PromptKind {
    BoomerangPlan,
    ToiPropose,
    ToiEvaluate,
    ReactStep,
    ReactSelect,
    Io,
    IoCot,
    IoP,
    IoCotP,
    Reflexion,
}

impl PromptKind {
    pub const ALL: [PromptKind; 10] = [
        PromptKind::BoomerangPlan,
        PromptKind::ToiPropose,
        PromptKind::ToiEvaluate,
        PromptKind::ReactStep,
        PromptKind::ReactSelect,
        PromptKind::Io,
        PromptKind::IoCot,
        PromptKind::IoP,
        PromptKind::IoCotP,
        PromptKind::Reflexion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PromptKind::BoomerangPlan => "boomerang_plan",
            PromptKind::ToiPropose => "toi_propose",
            PromptKind::ToiEvaluate => "toi_evaluate",
            PromptKind::ReactStep => "react_step",
            PromptKind::ReactSelect => "react_select",
            PromptKind::Io => "io",
            PromptKind::IoCot => "io_cot",
            PromptKind::IoP => "io_p",
            PromptKind::IoCotP => "io_cot_p",
            PromptKind::Reflexion => "reflexion",
        }
    }
}

impl std::fmt::Display for PromptKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Structured inputs for [`build_prompt`]. Which fields are required depends
/// on the kind; a missing required field is an error, never a silent blank.
#[derive(Debug, Clone, Copy, Default)]
pub struct PromptInputs<'a> {
    /// Current or starting state, already rendered to text.
    pub state_text: Option<&'a str>,
    pub goal_text: Option<&'a str>,
    /// Display names of the applicable actions.
    pub valid_actions: Option<&'a [String]>,
    /// Pre-rendered history block (attempts, interactions, or visited states).
    pub history_text: Option<&'a str>,
    pub feedback: Option<&'a str>,
    /// Number of actions to propose (proposal prompts only).
    pub k: Option<usize>,
    /// Optional fixed in-context example block; none by default.
    pub example: Option<&'a str>,
}

const ENV_HEADER: &str = "Below is a description of the environment:";
const INSTANCE_SEPARATOR: &str = "--------- Provided Instance --------";

const TRANSLATION_SKELETON: &str = "\
You are an assistant that summarizes PDDL predicates into natural language.

You will receive the following to summarize into natural language
Predicates: ...
Objects: ...

where
- 'Predicates' is a list of PDDL predicates
- 'Objects' is a list of objects

You may also receive the following:
Goal: ...

where
- 'Goal' is a list of PDDL predicates

It is important to incorporate all predicates and objects into the succinct summary.
An agent will be using this summary to understand the state of the environment and
if anything is missing, it may lead to confusion.";

const BOOMERANG_SKELETON: &str = "\
You must propose a sequence of actions given previous interactions with the environment
from the starting state to the goal state.

You will receive the initial state and the goal as follows:
Optional[Error Feedback: ...]
States Visited: ...
<action1>: ...
<action2>: ...
...
<actionN>: ...
Starting State: ...
Valid Actions: ...
Goal State: ...

where
- 'States Visited' are the states you visited in your previous action sequence
  - This will be empty if this is your first action sequence
  - Each action will be followed by the state that resulted from executing that action
- 'Starting State' is the state you will start from
- 'Valid Actions' are the actions you can take in the starting state
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about either
  - the sequence of actions you proposed in the previous step included an invalid action
  - the sequence of actions you proposed in the previous step did not reach the goal state

Always format your response as follows:
Reflect: ...
Think: ...
Action Sequence: <action1>, <action2>, ..., <actionN>

where:
- 'Reflect' includes lessons learned about the rules of the environment
  - Upon receiving error feedback, reflect on the feedback and propose a new plan
    - If the action is invalid, first verify that the action isn't malformed
      - Refer to the action format in the environment description
    - If it isn't malformed, consider why the action is invalid at that state
  - Consider which action(s) in the previous sequence led to the error
- 'Think' includes your thought process for the next action sequence to propose
  - Use your current and previous reflections to inform the next action sequence
- 'Action Sequence' is the sequence of actions you propose to take in the environment from the starting state to the goal state
  - This sequence should be a comma-separated list of actions
  - Each action should be formatted to match the templates in the environment description.

Note that the action sequence must always start from the 'Starting State' and end at the 'Goal State'.";

const TOI_PROPOSE_SKELETON: &str = "\
You will propose various options for actions that could be taken in the environment to make progress towards the goal.

You will receive the initial state and the goal as follows:
Optional[Error Feedback: ...]
Number of Actions: ...
Current State: ...
Valid Actions: ...
Goal State: ...

where
- 'Number of Actions' is the number of actions you need to propose
- 'Current State' is the state you will start from
- 'Valid Actions' are the actions that can be executed in the current state
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about the actions you proposed in the previous step such as
  - the sequence of actions you proposed included an invalid action
  - the sequence of actions did not include the specified number of actions

Always format your response as follows:
Think: ...
Actions: <action1>, <action2>, ..., <actionN>

where:
- 'Think' includes reasoning about the actions you will propose to take
  - You should consider actions from the valid actions that will help you reach the goal state
- 'Actions' are <Number of Actions> actions that you propose to take at the current state
  - These actions should come directly from the valid actions
  - This sequence should be a comma-separated list of actions
  - The actions should be formatted exactly as they are in the environment description";

const TOI_EVALUATE_SKELETON: &str = "\
You will evaluate the current state based on its likelihood to be on the path to the goal state.

You will receive the initial state and the goal as follows:
Optional[Error Feedback: ...]
Current State: ...
Goal State: ...

where
- 'Current State' is the state you will evaluate
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about the evaluation you provided in the previous step such as
  - the evaluation you provided was not formatted correctly

Always format your response as follows:
Think: ...
Rating: <sure/maybe/impossible>

where:
- 'Think' includes reasoning about the likelihood of the current state being on the path to the goal state
  - You should consider the current state and the goal state
- 'Rating' is your evaluation of the current state based on the likelihood of it being on the path to the goal state
  - sure: the current state is definitely on the path to the goal state
  - maybe: the current state might be on the path to the goal state
  - impossible: the current state is definitely not on the path to the goal state";

const REACT_STEP_SKELETON: &str = "\
You must propose a single action to execute in the environment given previous interactions with the environment.

You will receive the current state and the goal as follows:
Optional[Error Feedback: ...]
Previous Interactions: ...
Current State: ...
Valid Actions: ...
Goal State: ...

where
- 'Previous Interactions' are the queries you made to the environment and their responses
  - This will be empty if this is your first action
- 'Current State' is the state you will act from
- 'Valid Actions' are the actions that can be executed in the current state
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about the action you proposed in the previous step such as
  - the action you proposed was invalid at the current state
  - the action you proposed was not formatted correctly

Always format your response as follows:
Think: ...
Actions: <action>

where:
- 'Think' includes your reasoning about the next action to take
  - Use your previous interactions to inform your next action
- 'Actions' is the single action you propose to take at the current state
  - The action should be formatted exactly as it is in the environment description";

const REACT_SELECT_SKELETON: &str = "\
You must choose a state you have visited and propose a single action to execute from that state.

You will receive your interaction history and the goal as follows:
Optional[Error Feedback: ...]
States Visited: ...
Goal State: ...

where
- 'States Visited' are the states you have visited, numbered in visit order
  - Each state is followed by the actions that are valid in it
  - You may choose any of the numbered states to act from
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about the selection you proposed in the previous step such as
  - the state index you selected was out of range
  - the action you proposed was not formatted correctly

Always format your response as follows:
Think: ...
Selection: state <index>, <action>

where:
- 'Think' includes your reasoning about which state to act from and which action to take there
- 'Selection' is the state index you choose to act from and the single action you propose to execute
  - The state index must be one of the numbered states visited
  - The action should be formatted exactly as it is in the environment description";

const REFLEXION_SKELETON: &str = "\
You must propose a single action to execute in the environment given previous interactions with the environment.
Whenever your actions revisit a state, you are reset to the starting state to try again.

You will receive the current state and the goal as follows:
Optional[Error Feedback: ...]
Previous Interactions: ...
Current State: ...
Valid Actions: ...
Goal State: ...

where
- 'Previous Interactions' are the queries you made to the environment and their responses
  - This will be empty if this is your first action
  - A note that cycling occurred means you revisited a state and were reset to the starting state
- 'Current State' is the state you will act from
- 'Valid Actions' are the actions that can be executed in the current state
- 'Goal State' is the state you need to reach to achieve the goal
- 'Error Feedback' includes feedback about the action you proposed in the previous step such as
  - the action you proposed was invalid at the current state
  - the action you proposed was not formatted correctly

Always format your response as follows:
Reflect: ...
Think: ...
Actions: <action>

where:
- 'Reflect' includes lessons learned from your previous interactions
  - Upon a note that cycling occurred, reflect on why your actions revisited a state
- 'Think' includes your reasoning about the next action to take
  - Use your reflections and previous interactions to inform your next action
- 'Actions' is the single action you propose to take at the current state
  - The action should be formatted exactly as it is in the environment description";

const IO_SKELETON: &str = "\
You must propose a sequence of actions that reaches the goal state from the starting state.

You will receive the initial state and the goal as follows:
Starting State: ...
Valid Actions: ...
Goal State: ...

where
- 'Starting State' is the state you will start from
- 'Valid Actions' are the actions you can take in the starting state
- 'Goal State' is the state you need to reach to achieve the goal

Always format your response as follows:
Action Sequence: <action1>, <action2>, ..., <actionN>

where:
- 'Action Sequence' is the sequence of actions you propose to take in the environment from the starting state to the goal state
  - This sequence should be a comma-separated list of actions
  - Each action should be formatted to match the templates in the environment description.

Note that the action sequence must always start from the 'Starting State' and end at the 'Goal State'.";

const IO_COT_SKELETON: &str = "\
You must propose a sequence of actions that reaches the goal state from the starting state.

You will receive the initial state and the goal as follows:
Starting State: ...
Valid Actions: ...
Goal State: ...

where
- 'Starting State' is the state you will start from
- 'Valid Actions' are the actions you can take in the starting state
- 'Goal State' is the state you need to reach to achieve the goal

Always format your response as follows:
Think: ...
Action Sequence: <action1>, <action2>, ..., <actionN>

where:
- 'Think' includes your step-by-step reasoning about how to reach the goal state from the starting state
- 'Action Sequence' is the sequence of actions you propose to take in the environment from the starting state to the goal state
  - This sequence should be a comma-separated list of actions
  - Each action should be formatted to match the templates in the environment description.

Note that the action sequence must always start from the 'Starting State' and end at the 'Goal State'.";

/// Wording relaxation applied by the `P` prompt variants: lets the model use
/// the pick-up/put-down pair for block-on-block moves instead of forcing
/// stack/unstack phrasing.
const PICKUP_RELAXATION_NOTE: &str = "\
Note that the pick-up action may also be used to pick up a block that is on top of another block, and the put-down action may also be used to put a block down on top of another block.";

const STATE_TRACKING_NOTE: &str = "\
After each action in your sequence, state the environment state that results from executing that action, and restate the goal condition to check whether it has been reached.";

fn skeleton(kind: PromptKind) -> String {
    match kind {
        PromptKind::BoomerangPlan => BOOMERANG_SKELETON.to_string(),
        PromptKind::ToiPropose => TOI_PROPOSE_SKELETON.to_string(),
        PromptKind::ToiEvaluate => TOI_EVALUATE_SKELETON.to_string(),
        PromptKind::ReactStep => REACT_STEP_SKELETON.to_string(),
        PromptKind::ReactSelect => REACT_SELECT_SKELETON.to_string(),
        PromptKind::Io => IO_SKELETON.to_string(),
        PromptKind::IoCot => IO_COT_SKELETON.to_string(),
        PromptKind::IoP => format!("{IO_SKELETON}\n\n{PICKUP_RELAXATION_NOTE}"),
        PromptKind::IoCotP => {
            format!("{IO_COT_SKELETON}\n\n{PICKUP_RELAXATION_NOTE}\n{STATE_TRACKING_NOTE}")
        }
        PromptKind::Reflexion => REFLEXION_SKELETON.to_string(),
    }
}

fn missing(kind: PromptKind, field: &str) -> LlmError {
    LlmError::MissingField {
        kind: kind.name().to_string(),
        field: field.to_string(),
    }
}

fn require<'a>(kind: PromptKind, value: Option<&'a str>, field: &str) -> Result<&'a str, LlmError> {
    value.ok_or_else(|| missing(kind, field))
}

fn action_lines(actions: &[String]) -> String {
    actions
        .iter()
        .map(|a| format!("- {a}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Assemble the (system, user) pair for one call. Identical inputs produce
/// identical bytes.
pub fn build_prompt(
    kind: PromptKind,
    ctx: &WorldContext,
    inputs: &PromptInputs<'_>,
) -> Result<(String, String), LlmError> {
    let mut system = skeleton(kind);
    if let Some(example) = inputs.example {
        system.push_str("\n\nBelow is an example:\n");
        system.push_str(example);
    }
    system.push_str("\n\n");
    system.push_str(ENV_HEADER);
    system.push('\n');
    system.push_str(&ctx.render());

    let mut user = String::new();
    user.push_str(INSTANCE_SEPARATOR);
    user.push('\n');
    if let Some(feedback) = inputs.feedback {
        user.push_str(&format!("Error Feedback: {feedback}\n"));
    }
    match kind {
        PromptKind::BoomerangPlan => {
            if let Some(history) = inputs.history_text {
                user.push_str("States Visited:\n");
                user.push_str(history);
                user.push('\n');
            }
            user.push_str("Starting State:\n");
            user.push_str(require(kind, inputs.state_text, "state_text")?);
            user.push_str("\nValid Actions:\n");
            user.push_str(&action_lines(
                inputs
                    .valid_actions
                    .ok_or_else(|| missing(kind, "valid_actions"))?,
            ));
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
        PromptKind::ToiPropose => {
            let k = inputs.k.ok_or_else(|| missing(kind, "k"))?;
            user.push_str(&format!("Number of Actions: {k}\n"));
            user.push_str("Current State:\n");
            user.push_str(require(kind, inputs.state_text, "state_text")?);
            user.push_str("\nValid Actions:\n");
            user.push_str(&action_lines(
                inputs
                    .valid_actions
                    .ok_or_else(|| missing(kind, "valid_actions"))?,
            ));
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
        PromptKind::ToiEvaluate => {
            user.push_str("Current State:\n");
            user.push_str(require(kind, inputs.state_text, "state_text")?);
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
        PromptKind::ReactStep | PromptKind::Reflexion => {
            if let Some(history) = inputs.history_text {
                user.push_str("Previous Interactions:\n");
                user.push_str(history);
                user.push('\n');
            }
            user.push_str("Current State:\n");
            user.push_str(require(kind, inputs.state_text, "state_text")?);
            user.push_str("\nValid Actions:\n");
            user.push_str(&action_lines(
                inputs
                    .valid_actions
                    .ok_or_else(|| missing(kind, "valid_actions"))?,
            ));
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
        PromptKind::ReactSelect => {
            user.push_str("States Visited:\n");
            user.push_str(require(kind, inputs.history_text, "history_text")?);
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
        PromptKind::Io | PromptKind::IoCot | PromptKind::IoP | PromptKind::IoCotP => {
            user.push_str("Starting State:\n");
            user.push_str(require(kind, inputs.state_text, "state_text")?);
            user.push_str("\nValid Actions:\n");
            user.push_str(&action_lines(
                inputs
                    .valid_actions
                    .ok_or_else(|| missing(kind, "valid_actions"))?,
            ));
            user.push_str("\nGoal State:\n");
            user.push_str(require(kind, inputs.goal_text, "goal_text")?);
        }
    }
    Ok((system, user))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationKind {
    /// Summarize a state's predicates (with the object list).
    StateAtoms,
    /// Summarize goal predicates.
    Goal,
}

/// Prompt for turning predicate lists into natural-language summaries.
pub fn build_translation_prompt(
    kind: TranslationKind,
    ctx: &WorldContext,
    predicates_csv: &str,
    objects_csv: Option<&str>,
) -> (String, String) {
    let mut system = TRANSLATION_SKELETON.to_string();
    system.push_str("\n\n");
    system.push_str(ENV_HEADER);
    system.push('\n');
    system.push_str(&ctx.render());
    let mut user = String::new();
    user.push_str(INSTANCE_SEPARATOR);
    user.push('\n');
    match kind {
        TranslationKind::StateAtoms => {
            user.push_str(&format!("Predicates: {predicates_csv}\n"));
            if let Some(objects) = objects_csv {
                user.push_str(&format!("Objects: {objects}"));
            }
        }
        TranslationKind::Goal => {
            user.push_str(&format!("Goal: {predicates_csv}"));
        }
    }
    (system, user)
}
