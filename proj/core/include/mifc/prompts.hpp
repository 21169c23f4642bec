#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mifc {

enum class PromptId { kCondense, kGenQa, kExpandAnswer, kJudgeQa, kTranslate };

std::string_view prompt_id_name(PromptId id);
PromptId parse_prompt_id(std::string_view name);

/// A prompt body with `{name}` placeholders. Bodies of the built-in templates
/// are kept verbatim; only the placeholders are substituted at render time.
struct PromptTemplate {
    PromptId id;
    std::string_view body;
};

const PromptTemplate& builtin_template(PromptId id);

/// Placeholder names in order of first appearance. A placeholder is `{`
/// followed by [A-Za-z_]+ and `}`; other braces (like the JSON example in the
/// judge prompt) are literal text.
std::vector<std::string> placeholders(std::string_view body);

using PromptBindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every placeholder in a single pass; bound values are inserted
/// verbatim and never re-scanned. Throws RenderError naming the first unbound
/// placeholder.
std::string render(const PromptTemplate& tmpl, const PromptBindings& bindings);

/// A rendered prompt split into chat roles: template text before the
/// "User Input: " line becomes the system message, the rest the user message.
struct RenderedPrompt {
    std::string system;
    std::string user;
};

RenderedPrompt render_roles(const PromptTemplate& tmpl, const PromptBindings& bindings);

}  // namespace mifc
