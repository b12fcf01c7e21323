#include "mobgen/prompts.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "mobgen/errors.hpp"

namespace mobgen {

namespace {

#include "prompts_builtin.inc"

// Ablation prompt for plan generation without the narrative stage: same
// output contract as the extraction template, but the model invents the day.
inline constexpr std::string_view kDirectPlanSystem =
    R"tmpl(You are a daily schedule planner. You produce realistic, chronologically ordered daily activity plans as structured JSON.
)tmpl";

inline constexpr std::string_view kDirectPlanUser =
    R"tmpl({character_profile}

**Activity Categories:**
{activity_categories}

**Your Task:**
Create a plausible full-day activity plan for the character described above.

**Output Format (Strictly JSON):**
- Respond with a single JSON object with a key "plan".
- The `activity` MUST be one of the specified activity categories.
- The `start_time` MUST be in "HH:MM" format (24-hour clock).
- The `description` should be a brief summary of the activity.
- The first activity should start at "00:00" and be "sleep".

**Example:**
{example_json}
)tmpl";

bool is_placeholder_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::string render_text(const std::string& text, const Bindings& bindings,
                        std::vector<std::string>* used_names) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == '{') {
      if (i + 1 < text.size() && text[i + 1] == '{') {
        out.push_back('{');
        i += 2;
        continue;
      }
      std::size_t j = i + 1;
      while (j < text.size() && is_placeholder_char(text[j])) ++j;
      if (j > i + 1 && j < text.size() && text[j] == '}') {
        const std::string name = text.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw TemplateError("no binding for placeholder {" + name + "}");
        }
        out += it->second;
        if (used_names) used_names->push_back(name);
        i = j + 1;
        continue;
      }
      out.push_back('{');
      ++i;
      continue;
    }
    if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
      out.push_back('}');
      i += 2;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

RenderedPrompt render(const PromptTemplate& tpl, const Bindings& bindings,
                      std::vector<std::string>* warnings) {
  std::vector<std::string> used;
  RenderedPrompt r;
  r.system_text = render_text(tpl.system_text, bindings, &used);
  r.user_text = render_text(tpl.user_text, bindings, &used);
  if (warnings) {
    const std::set<std::string> used_set(used.begin(), used.end());
    for (const auto& [name, _] : bindings) {
      if (!used_set.count(name)) {
        warnings->push_back("binding \"" + name + "\" is not referenced by template \"" +
                            tpl.name + "\"");
      }
    }
  }
  return r;
}

TemplateLibrary TemplateLibrary::builtin() {
  TemplateLibrary lib;
  const auto add = [&](std::string_view name, std::string_view sys, std::string_view user) {
    lib.templates_[std::string(name)] =
        PromptTemplate{std::string(name), std::string(sys), std::string(user)};
  };
  add(templates::kNarrative, kNarrativeSystem, kNarrativeUser);
  add(templates::kPlanExtract, kPlanExtractSystem, kPlanExtractUser);
  add(templates::kRethink, kRethinkSystem, kRethinkUser);
  add(templates::kModeChoice, kModeChoiceSystem, kModeChoiceUser);
  add(templates::kDirectPlan, kDirectPlanSystem, kDirectPlanUser);
  return lib;
}

TemplateLibrary TemplateLibrary::with_overrides(const std::filesystem::path& dir) {
  TemplateLibrary lib = builtin();
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("template override directory does not exist: " + dir.string());
  }
  for (auto& [name, tpl] : lib.templates_) {
    const std::filesystem::path file = dir / (name + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read template override " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();

    const std::string sys_marker = "[system]\n";
    const std::string user_marker = "\n[user]\n";
    const std::size_t sys_at = content.find(sys_marker);
    const std::size_t user_at = content.find(user_marker);
    if (sys_at != 0 || user_at == std::string::npos) {
      throw ConfigError("template override " + file.string() +
                        " must start with a [system] section followed by a [user] section");
    }
    tpl.system_text = content.substr(sys_marker.size(), user_at - sys_marker.size());
    tpl.user_text = content.substr(user_at + user_marker.size());
  }
  return lib;
}

const PromptTemplate& TemplateLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw ConfigError("unknown prompt template \"" + std::string(name) + "\"");
  }
  return it->second;
}

std::vector<std::string> TemplateLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(templates_.size());
  for (const auto& [name, _] : templates_) out.push_back(name);
  return out;
}

}  // namespace mobgen
