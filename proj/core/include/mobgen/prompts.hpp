#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mobgen {

struct PromptTemplate {
  std::string name;
  std::string system_text;
  std::string user_text;
};

struct RenderedPrompt {
  std::string system_text;
  std::string user_text;
};

using Bindings = std::map<std::string, std::string>;

/// Substitutes every {name} placeholder from the bindings; "{{" and "}}"
/// render as literal braces, and a lone brace that does not form a
/// placeholder is kept verbatim. A placeholder with no binding throws
/// TemplateError naming it; bindings that were never referenced are reported
/// through `warnings` and otherwise ignored.
RenderedPrompt render(const PromptTemplate& tpl, const Bindings& bindings,
                      std::vector<std::string>* warnings = nullptr);

/// Same substitution for a single text block.
std::string render_text(const std::string& text, const Bindings& bindings,
                        std::vector<std::string>* used_names = nullptr);

namespace templates {
inline constexpr std::string_view kNarrative = "narrative";
inline constexpr std::string_view kPlanExtract = "plan_extract";
inline constexpr std::string_view kRethink = "rethink";
inline constexpr std::string_view kModeChoice = "mode_choice";
inline constexpr std::string_view kDirectPlan = "direct_plan";
}  // namespace templates

/// The run's prompt set: built-in defaults, optionally overridden per
/// template by files in a directory (see with_overrides).
class TemplateLibrary {
public:
  static TemplateLibrary builtin();

  /// Built-ins plus overrides read from `<dir>/<name>.txt`. An override file
  /// holds a line "[system]", the system text, a line "[user]", then the
  /// user text. Absent files keep the built-in template.
  static TemplateLibrary with_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(std::string_view name) const;  // throws ConfigError
  std::vector<std::string> names() const;

private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace mobgen
