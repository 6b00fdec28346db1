use std::fmt;

use serde::{Deserialize, Serialize};

use super::ids::{is_class_name, ReceptacleId};

/// The six household task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskType {
    PickAndPlace,
    ExamineInLight,
    CleanAndPlace,
    HeatAndPlace,
    CoolAndPlace,
    PickTwoAndPlace,
}

impl TaskType {
    pub const ALL: [TaskType; 6] = [
        TaskType::PickAndPlace,
        TaskType::ExamineInLight,
        TaskType::CleanAndPlace,
        TaskType::HeatAndPlace,
        TaskType::CoolAndPlace,
        TaskType::PickTwoAndPlace,
    ];

    /// File-name slug, e.g. `pick_two_and_place`.
    pub fn slug(self) -> &'static str {
        match self {
            TaskType::PickAndPlace => "pick_and_place",
            TaskType::ExamineInLight => "examine_in_light",
            TaskType::CleanAndPlace => "clean_and_place",
            TaskType::HeatAndPlace => "heat_and_place",
            TaskType::CoolAndPlace => "cool_and_place",
            TaskType::PickTwoAndPlace => "pick_two_and_place",
        }
    }

    pub fn from_slug(slug: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.slug() == slug)
    }
}

/// Which of the two goal phrasings a task uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phrasing {
    A,
    B,
}

/// Goal location: either a specific receptacle or any receptacle of a class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReceptacleTarget {
    Id(ReceptacleId),
    Class(String),
}

impl ReceptacleTarget {
    pub fn matches(&self, id: &ReceptacleId) -> bool {
        match self {
            ReceptacleTarget::Id(target) => target == id,
            ReceptacleTarget::Class(class) => id.class() == class,
        }
    }

    pub fn class(&self) -> &str {
        match self {
            ReceptacleTarget::Id(id) => id.class(),
            ReceptacleTarget::Class(class) => class,
        }
    }

    /// Accepts `sofa 1` (a specific receptacle) or `sofa` (any sofa).
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if is_class_name(s) {
            return Some(ReceptacleTarget::Class(s.to_string()));
        }
        s.parse().ok().map(ReceptacleTarget::Id)
    }
}

impl fmt::Display for ReceptacleTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceptacleTarget::Id(id) => id.fmt(f),
            ReceptacleTarget::Class(class) => f.write_str(class),
        }
    }
}

impl Serialize for ReceptacleTarget {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReceptacleTarget {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ReceptacleTarget::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid receptacle target `{s}`")))
    }
}

/// A goal for one episode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    #[serde(rename = "type")]
    pub task_type: TaskType,
    pub object_class: String,
    /// Absent only for [`TaskType::ExamineInLight`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receptacle: Option<ReceptacleTarget>,
    /// Present only for [`TaskType::ExamineInLight`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lamp_class: Option<String>,
    pub phrasing: Phrasing,
}

impl TaskSpec {
    pub fn place(
        task_type: TaskType,
        object_class: &str,
        receptacle: ReceptacleTarget,
        phrasing: Phrasing,
    ) -> Self {
        assert_ne!(task_type, TaskType::ExamineInLight, "use TaskSpec::examine");
        Self {
            task_type,
            object_class: object_class.to_string(),
            receptacle: Some(receptacle),
            lamp_class: None,
            phrasing,
        }
    }

    pub fn examine(object_class: &str, lamp_class: &str, phrasing: Phrasing) -> Self {
        Self {
            task_type: TaskType::ExamineInLight,
            object_class: object_class.to_string(),
            receptacle: None,
            lamp_class: Some(lamp_class.to_string()),
            phrasing,
        }
    }

    /// Checks the shape invariants; returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        if !is_class_name(&self.object_class) {
            return Err(format!("invalid object class `{}`", self.object_class));
        }
        let examine = self.task_type == TaskType::ExamineInLight;
        match (&self.lamp_class, examine) {
            (Some(_), false) => return Err("lamp_class is only allowed for ExamineInLight".into()),
            (None, true) => return Err("ExamineInLight requires lamp_class".into()),
            (Some(lamp), true) if !is_class_name(lamp) => {
                return Err(format!("invalid lamp class `{lamp}`"))
            }
            _ => {}
        }
        match (&self.receptacle, examine) {
            (None, false) => Err(format!("{:?} requires a receptacle", self.task_type)),
            (Some(_), true) => Err("ExamineInLight takes no receptacle".into()),
            _ => Ok(()),
        }
    }
}

/// Instantiates the goal sentence for a task, e.g. `cool some pan and put it in countertop`.
pub fn format_goal_instruction(task: &TaskSpec) -> String {
    let obj = &task.object_class;
    let recep = task.receptacle.as_ref().map(ToString::to_string).unwrap_or_default();
    let lamp = task.lamp_class.as_deref().unwrap_or_default();
    use Phrasing::{A, B};
    match (task.task_type, task.phrasing) {
        (TaskType::PickAndPlace, A) => format!("put a {obj} in {recep}"),
        (TaskType::PickAndPlace, B) => format!("put some {obj} on {recep}"),
        (TaskType::ExamineInLight, A) => format!("look at {obj} under the {lamp}"),
        (TaskType::ExamineInLight, B) => format!("examine the {obj} with the {lamp}"),
        (TaskType::CleanAndPlace, A) => format!("put a clean {obj} in {recep}"),
        (TaskType::CleanAndPlace, B) => format!("clean some {obj} and put it in {recep}"),
        (TaskType::HeatAndPlace, A) => format!("put a hot {obj} in {recep}"),
        (TaskType::HeatAndPlace, B) => format!("heat some {obj} and put it in {recep}"),
        (TaskType::CoolAndPlace, A) => format!("put a cool {obj} in {recep}"),
        (TaskType::CoolAndPlace, B) => format!("cool some {obj} and put it in {recep}"),
        (TaskType::PickTwoAndPlace, A) => format!("put two {obj} in {recep}"),
        (TaskType::PickTwoAndPlace, B) => format!("find two {obj} and put them in {recep}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: &str) -> ReceptacleTarget {
        ReceptacleTarget::Class(s.into())
    }

    #[test]
    fn goal_templates() {
        let t = TaskSpec::place(TaskType::CoolAndPlace, "pan", class("countertop"), Phrasing::B);
        assert_eq!(format_goal_instruction(&t), "cool some pan and put it in countertop");
        let t = TaskSpec::place(TaskType::PickTwoAndPlace, "pillow", class("sofa"), Phrasing::B);
        assert_eq!(format_goal_instruction(&t), "find two pillow and put them in sofa");
        let t = TaskSpec::place(TaskType::CoolAndPlace, "tomato", class("microwave"), Phrasing::A);
        assert_eq!(format_goal_instruction(&t), "put a cool tomato in microwave");
        let t = TaskSpec::examine("cd", "desklamp", Phrasing::B);
        assert_eq!(format_goal_instruction(&t), "examine the cd with the desklamp");
        let t = TaskSpec::place(
            TaskType::PickAndPlace,
            "pillow",
            ReceptacleTarget::Id("sofa 1".parse().unwrap()),
            Phrasing::A,
        );
        assert_eq!(format_goal_instruction(&t), "put a pillow in sofa 1");
    }

    #[test]
    fn validate_lamp_iff_examine() {
        let mut t = TaskSpec::examine("cd", "desklamp", Phrasing::A);
        assert!(t.validate().is_ok());
        t.lamp_class = None;
        assert!(t.validate().is_err());
        let mut t = TaskSpec::place(TaskType::HeatAndPlace, "egg", class("garbagecan"), Phrasing::A);
        assert!(t.validate().is_ok());
        t.lamp_class = Some("desklamp".into());
        assert!(t.validate().is_err());
    }

    #[test]
    fn target_parse() {
        assert_eq!(ReceptacleTarget::parse("sofa"), Some(class("sofa")));
        assert_eq!(
            ReceptacleTarget::parse("sofa 1"),
            Some(ReceptacleTarget::Id(ReceptacleId::new("sofa", 1)))
        );
        assert_eq!(ReceptacleTarget::parse("sofa one"), None);
    }

    #[test]
    fn slugs_round_trip() {
        for t in TaskType::ALL {
            assert_eq!(TaskType::from_slug(t.slug()), Some(t));
        }
    }
}
