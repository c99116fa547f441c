//! Prompt-adaptive reward engine: prompt construction, advice parsing and
//! the advisor-alignment shaping reward.

mod advice;
mod align;
mod prompt;

pub use advice::{parse_advice, Advice, AdviceUnparseable};
pub use align::{
    cam_align_penalty, dir_align, llm_shaping, move_reward, pos_align, AlignmentParams, Shaping,
};
pub use prompt::{
    build_prompt, format_zoom, PromptParts, ENV_HEADER, FIELD_OF_VIEW, QUERY_HEADER, RESOLUTION,
    TASK_HEADER,
};
