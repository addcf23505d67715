#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazenet/corpus.hpp"

namespace gazenet {

enum class TaskName { CvDS, CvD, CvS, DvS };

inline constexpr std::array<TaskName, 4> kTasks{TaskName::CvDS, TaskName::CvD, TaskName::CvS, TaskName::DvS};

// Binary classification setup over the three groups. Groups listed in
// zero_shot are never trained on but are still scored.
struct TaskSpec {
  TaskName name = TaskName::CvDS;
  std::vector<Group> positive;
  std::vector<Group> negative;
  std::vector<Group> zero_shot;

  static TaskSpec make(TaskName name);

  bool is_positive(Group g) const;
  bool is_negative(Group g) const;
  bool in_task(Group g) const { return is_positive(g) || is_negative(g); }
  // 1 / 0 for groups in the task, nullopt for zero-shot groups.
  std::optional<int> label(Group g) const;
};

std::string_view to_string(TaskName t);
TaskName parse_task(std::string_view s);

}  // namespace gazenet
