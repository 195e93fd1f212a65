use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::LlmError;

/// What a template's response is expected to look like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedOutput {
    FreeText,
    LabelList,
    ListOfLists,
    Table,
}

/// A named prompt with `{slot}` placeholders. Braces that do not enclose a
/// lowercase identifier are literal text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptTemplate {
    pub name: &'static str,
    pub body: &'static str,
    pub slots: &'static [&'static str],
    pub expected_output: ExpectedOutput,
}

const GROUPING: &str = "Please assume the role of an expert in the field of emotions. We provide a set of emotions. \
Please group the emotions, with each group containing emotions with the same meaning. Directly output the results. \
The output format should be a list containing multiple lists.\n\nEmotions: {labels}";

const SYNONYMS: &str =
    "Please retrieve the synonyms for the following words and output them in a table format.\n\nWords: {words}";

const FORMS: &str = "Please output different forms of the following word in a list format.\n\nWord: {word}";

const VISUAL_CLUE: &str = "As an expert in the field of emotions, please focus on facial expressions, body language, \
environmental cues, and events in the video and predict the emotional state of the character. Please ignore the \
character's identity. We uniformly sample 3 frames from this video. Please consider the temporal relationship between \
these frames and provide a complete description of this video. Avoid using descriptions like \"the first image\" and \
\"the second image\", and instead use terms like \"beginning\", \"middle\", and \"end\" to denote the progression of time.";

const ACOUSTIC_CLUE: &str = "As an expert in the field of emotions, please focus on the acoustic information in the \
audio to discern clues related to the emotions of the individual. Please provide a detailed description and \
ultimately predict the emotional state of the individual.";

const MERGE_CLUES: &str = "Please act as an expert in the field of emotions. We provide acoustic and visual clues that \
may be related to the character's emotional state, along with the original subtitle of the video. Please analyze which \
parts can infer the emotional state and explain the reasons. During the analysis, please integrate the textual, audio, \
and visual clues.\n\nAcoustic clues: {acoustic_clue}\nVisual clues: {visual_clue}\nSubtitle: {subtitle}";

const TRANSLATE_ZH_EN: &str = "Please translate the following sentence from Chinese into English.\n\n{sentence}";

const TRANSLATE_EN_ZH: &str = "Please translate the following sentence from English into Chinese.\n\n{sentence}";

const OV_EXTRACTION: &str = "Please assume the role of an expert in the field of emotions. We provide clues that may be \
related to the emotions of the characters. Based on the provided clues, please identify the emotional states of the \
main characters. Please separate different emotional categories with commas and output only the clearly identifiable \
emotional categories in a list format. If none are identified, please output an empty list.\n\nClues: {clues}";

const DISCRETE_RECOGNITION: &str = "Please assume the role of an expert in the emotional domain. We provide clues that \
may be related to the emotions of the character. Based on the provided clues, identify the emotional states of the \
main characters. We provide a set of emotional candidates, please rank them in order of likelihood from high to low. \
The candidate set is {happy, angry, worried, sad, surprise, neutral}.\n\nClues: {clues}";

const VALENCE_ESTIMATION: &str = "As an expert in the emotional domain, we provide clues that may be related to the \
emotions of characters. Based on the provided clues, please identify the overall positive or negative emotional \
polarity of the main characters. The output should be a floating-point number ranging from -5 to +5. Here, -5 \
indicates extremely negative emotions, 0 indicates neutral emotions, and +5 indicates extremely positive emotions. \
Larger numbers indicate more positive emotions, while smaller numbers indicate more negative emotions. Please provide \
your judgment as a floating-point number with two decimal places, directly outputting the numerical result without \
including the analysis process.\n\nClues: {clues}";

const VISUAL_CLUE_ANALYSIS: &str = "Please assume the role of an expert in the field of emotions. We provide clues \
related to the emotions of the characters in the video. Please output the facial movements and body gestures involved \
in the description, separated by commas. The output format should be in list form.\n\nClues: {clues}";

const AUDIO_LLM: &str = "As an expert in the field of emotions, please focus on the acoustic information in the audio \
to discern clues related to the emotions of the individual. Please provide a detailed description and ultimately \
predict the emotional state of the individual.";

const AUDIO_LLM_SUBTITLE: &str = "Subtitle content of the audio: {subtitle}; As an expert in the field of emotions, \
please focus on the acoustic information and subtitle content in the audio to discern clues related to the emotions of \
the individual. Please provide a detailed description and ultimately predict the emotional state of the individual in \
the audio.";

const VIDEO_LLM: &str = "As an expert in the field of emotions, please focus on the facial expressions, body \
movements, environment, etc., in the video to discern clues related to the emotions of the individual. Please provide \
a detailed description and ultimately predict the emotional state of the individual in the video.";

const VIDEO_LLM_SUBTITLE: &str = "Subtitle content of the video: {subtitle}; As an expert in the field of emotions, \
please focus on the facial expressions, body movements, environment, subtitle content, etc., in the video to discern \
clues related to the emotions of the individual. Please provide a detailed description and ultimately predict the \
emotional state of the individual.";

const AUDIO_VIDEO_LLM: &str = "As an expert in the field of emotions, please focus on the facial expressions, body \
movements, environment, acoustic information, etc., in the video to discern clues related to the emotions of the \
individual. Please provide a detailed description and ultimately predict the emotional state of the individual in the \
video.";

const AUDIO_VIDEO_LLM_SUBTITLE: &str = "Subtitle content of the video: {subtitle}; As an expert in the field of \
emotions, please focus on the facial expressions, body movements, environment, acoustic information, subtitle content, \
etc., in the video to discern clues related to the emotions of the individual. Please provide a detailed description \
and ultimately predict the emotional state of the individual in the video.";

macro_rules! template {
    ($name:literal, $body:ident, [$($slot:literal),*], $out:ident) => {
        PromptTemplate { name: $name, body: $body, slots: &[$($slot),*], expected_output: ExpectedOutput::$out }
    };
}

static REGISTRY: &[PromptTemplate] = &[
    template!("grouping", GROUPING, ["labels"], ListOfLists),
    template!("synonyms", SYNONYMS, ["words"], Table),
    template!("forms", FORMS, ["word"], LabelList),
    template!("visual_clue", VISUAL_CLUE, [], FreeText),
    template!("acoustic_clue", ACOUSTIC_CLUE, [], FreeText),
    template!("merge_clues", MERGE_CLUES, ["acoustic_clue", "visual_clue", "subtitle"], FreeText),
    template!("translate_zh_en", TRANSLATE_ZH_EN, ["sentence"], FreeText),
    template!("translate_en_zh", TRANSLATE_EN_ZH, ["sentence"], FreeText),
    template!("ov_extraction", OV_EXTRACTION, ["clues"], LabelList),
    template!("discrete_recognition", DISCRETE_RECOGNITION, ["clues"], LabelList),
    template!("valence_estimation", VALENCE_ESTIMATION, ["clues"], FreeText),
    template!("visual_clue_analysis", VISUAL_CLUE_ANALYSIS, ["clues"], LabelList),
    template!("audio_llm", AUDIO_LLM, [], FreeText),
    template!("audio_llm_subtitle", AUDIO_LLM_SUBTITLE, ["subtitle"], FreeText),
    template!("video_llm", VIDEO_LLM, [], FreeText),
    template!("video_llm_subtitle", VIDEO_LLM_SUBTITLE, ["subtitle"], FreeText),
    template!("audio_video_llm", AUDIO_VIDEO_LLM, [], FreeText),
    template!("audio_video_llm_subtitle", AUDIO_VIDEO_LLM_SUBTITLE, ["subtitle"], FreeText),
];

pub fn templates() -> &'static [PromptTemplate] {
    REGISTRY
}

pub fn template(name: &str) -> Result<&'static PromptTemplate, LlmError> {
    REGISTRY
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| LlmError::UnknownTemplate(name.to_string()))
}

/// Placeholder spans `(start, end, name)` in `body`, end exclusive.
fn placeholders(body: &str) -> Vec<(usize, usize, &str)> {
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let start = i + 1;
            let mut j = start;
            while j < bytes.len() && (bytes[j].is_ascii_lowercase() || bytes[j] == b'_' || (j > start && bytes[j].is_ascii_digit())) {
                j += 1;
            }
            if j > start && j < bytes.len() && bytes[j] == b'}' {
                out.push((i, j + 1, &body[start..j]));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Names of every placeholder occurring in `text`.
pub fn slot_names(text: &str) -> BTreeSet<&str> {
    placeholders(text).into_iter().map(|(_, _, n)| n).collect()
}

impl PromptTemplate {
    pub fn render(&self, slots: &BTreeMap<String, String>) -> Result<String, LlmError> {
        let missing: Vec<String> =
            self.slots.iter().filter(|s| !slots.contains_key(**s)).map(|s| s.to_string()).collect();
        if !missing.is_empty() {
            return Err(LlmError::MissingSlots { template: self.name.to_string(), missing });
        }
        if let Some(extra) = slots.keys().find(|k| !self.slots.contains(&k.as_str())) {
            return Err(LlmError::UnknownSlot { template: self.name.to_string(), slot: extra.clone() });
        }
        let mut out = String::with_capacity(self.body.len());
        let mut last = 0;
        for (start, end, name) in placeholders(self.body) {
            out.push_str(&self.body[last..start]);
            out.push_str(&slots[name]);
            last = end;
        }
        out.push_str(&self.body[last..]);
        Ok(out)
    }
}

/// Renders the named template with every declared slot bound.
pub fn render_prompt(name: &str, slots: &BTreeMap<String, String>) -> Result<String, LlmError> {
    template(name)?.render(slots)
}
