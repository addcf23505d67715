#include "gazenet/task.hpp"

#include <algorithm>

namespace gazenet {

TaskSpec TaskSpec::make(TaskName name) {
  switch (name) {
    case TaskName::CvDS:
      return {name, {Group::D, Group::S}, {Group::C}, {}};
    case TaskName::CvD:
      return {name, {Group::D}, {Group::C}, {Group::S}};
    case TaskName::CvS:
      return {name, {Group::S}, {Group::C}, {Group::D}};
    case TaskName::DvS:
      return {name, {Group::S}, {Group::D}, {Group::C}};
  }
  throw ConfigError("unknown task");
}

bool TaskSpec::is_positive(Group g) const { return std::find(positive.begin(), positive.end(), g) != positive.end(); }
bool TaskSpec::is_negative(Group g) const { return std::find(negative.begin(), negative.end(), g) != negative.end(); }

std::optional<int> TaskSpec::label(Group g) const {
  if (is_positive(g)) return 1;
  if (is_negative(g)) return 0;
  return std::nullopt;
}

std::string_view to_string(TaskName t) {
  switch (t) {
    case TaskName::CvDS:
      return "CvDS";
    case TaskName::CvD:
      return "CvD";
    case TaskName::CvS:
      return "CvS";
    case TaskName::DvS:
      return "DvS";
  }
  return "?";
}

TaskName parse_task(std::string_view s) {
  s = trim(s);
  for (auto t : kTasks) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

}  // namespace gazenet
