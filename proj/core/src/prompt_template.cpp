#include <fstream>
#include <sstream>

#include "default_templates.hpp"
#include "scribe/errors.hpp"
#include "scribe/prompt.hpp"
#include "scribe/text.hpp"

namespace scribe {
namespace {

constexpr std::string_view kHeaderPrefix = "# scribe-template ";

const std::set<std::string>& generation_slots() {
    static const std::set<std::string> slots = {"short_term_memory", "retrieved_memory", "previous_content",
                                                "current_plan", "output_format"};
    return slots;
}

const std::set<std::string>& allowed_slots(TemplateName name) {
    static const std::set<std::string> init = {"title", "genre", "background", "perspective", "output_format"};
    static const std::set<std::string> select = {"short_term_memory", "plans", "choice_framing", "output_format"};
    switch (name) {
        case TemplateName::init: return init;
        case TemplateName::select_plan: return select;
        default: return generation_slots();
    }
}

TemplateName template_name_from_string(std::string_view name) {
    if (name == "init") return TemplateName::init;
    if (name == "generate-writer") return TemplateName::generate_writer;
    if (name == "generate-fiction") return TemplateName::generate_fiction;
    if (name == "select-plan") return TemplateName::select_plan;
    throw Error(ErrorCode::template_invalid, "unknown template name: " + std::string(name));
}

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::template_invalid, "invalid template: " + what);
}

std::string strip_blank_lines(std::string_view text) {
    // Trims leading and trailing whitespace-only lines, keeping indentation of the first line.
    std::size_t begin = 0;
    while (true) {
        auto nl = text.find('\n', begin);
        if (nl == std::string_view::npos || !is_blank(text.substr(begin, nl - begin))) break;
        begin = nl + 1;
    }
    std::size_t end = text.size();
    while (end > begin && (text[end - 1] == '\n' || text[end - 1] == ' ' || text[end - 1] == '\t' ||
                           text[end - 1] == '\r')) {
        --end;
    }
    return std::string(text.substr(begin, end - begin));
}

void collect_placeholders(std::string_view text, std::set<std::string>& out) {
    std::size_t at = 0;
    while ((at = text.find("{{", at)) != std::string_view::npos) {
        const auto close = text.find("}}", at + 2);
        if (close == std::string_view::npos) invalid("unterminated placeholder");
        out.insert(std::string(text.substr(at + 2, close - at - 2)));
        at = close + 2;
    }
}

}  // namespace

const char* to_string(TemplateName name) noexcept {
    switch (name) {
        case TemplateName::init: return "init";
        case TemplateName::generate_writer: return "generate-writer";
        case TemplateName::generate_fiction: return "generate-fiction";
        case TemplateName::select_plan: return "select-plan";
    }
    return "init";
}

const char* to_string(Role role) noexcept {
    return role == Role::system ? "system" : "user";
}

PromptTemplate PromptTemplate::parse(std::string_view source) {
    PromptTemplate tmpl;
    std::istringstream in{std::string(source)};
    std::string line;
    if (!std::getline(in, line) || line.rfind(kHeaderPrefix, 0) != 0) invalid("missing '# scribe-template' header");

    std::string_view header = std::string_view(line).substr(kHeaderPrefix.size());
    const auto space = header.find(' ');
    if (space == std::string_view::npos) invalid("header must name a template and a version");
    tmpl.name_ = template_name_from_string(header.substr(0, space));
    auto version = trim(header.substr(space + 1));
    if (version.size() < 2 || version[0] != 'v') invalid("version must look like v<number>");
    try {
        tmpl.version_ = std::stoi(std::string(version.substr(1)));
    } catch (const std::exception&) {
        invalid("version must look like v<number>");
    }

    std::optional<TemplateSection> current;
    std::string body;
    auto flush = [&] {
        if (!current) return;
        current->text = strip_blank_lines(body);
        tmpl.sections_.push_back(std::move(*current));
        current.reset();
        body.clear();
    };
    while (std::getline(in, line)) {
        auto stripped = trim(line);
        if (stripped.size() > 2 && stripped.front() == '[' && stripped.back() == ']' &&
            stripped.find("{{") == std::string_view::npos) {
            flush();
            auto inner = stripped.substr(1, stripped.size() - 2);
            auto colon = inner.find(':');
            auto role_name = inner.substr(0, colon);
            TemplateSection section;
            if (role_name == "system") {
                section.role = Role::system;
            } else if (role_name == "user") {
                section.role = Role::user;
            } else {
                invalid("unknown role '" + std::string(role_name) + "'");
            }
            section.label = std::string(colon == std::string_view::npos ? role_name : inner.substr(colon + 1));
            current = std::move(section);
            continue;
        }
        if (!current) {
            if (!is_blank(line)) invalid("text before the first section");
            continue;
        }
        body += line;
        body += '\n';
    }
    flush();
    if (tmpl.sections_.empty()) invalid("no sections");

    for (const auto& section : tmpl.sections_) collect_placeholders(section.text, tmpl.placeholders_);
    for (const auto& slot : tmpl.placeholders_) {
        if (!allowed_slots(tmpl.name_).contains(slot)) invalid("unknown slot {{" + slot + "}}");
    }
    const bool generation =
        tmpl.name_ == TemplateName::generate_writer || tmpl.name_ == TemplateName::generate_fiction;
    if (generation && tmpl.placeholders_ != generation_slots()) {
        invalid("generation templates must use exactly the slots short_term_memory, retrieved_memory, "
                "previous_content, current_plan and output_format");
    }
    if (!tmpl.placeholders_.contains("output_format")) invalid("missing {{output_format}}");
    if (generation) {
        for (const auto& section : tmpl.sections_) {
            if (section.text.find("{{retrieved_memory}}") != std::string::npos) {
                std::set<std::string> in_section;
                collect_placeholders(section.text, in_section);
                if (in_section.size() != 1) invalid("{{retrieved_memory}} must have a section of its own");
            }
        }
    }
    return tmpl;
}

TemplateSet TemplateSet::defaults() {
    TemplateSet set;
    for (auto name : {TemplateName::init, TemplateName::generate_writer, TemplateName::generate_fiction,
                      TemplateName::select_plan}) {
        set.set(PromptTemplate::parse(detail::default_template_source(name)));
    }
    return set;
}

void TemplateSet::load_overrides(const std::filesystem::path& dir) {
    for (auto name : {TemplateName::init, TemplateName::generate_writer, TemplateName::generate_fiction,
                      TemplateName::select_plan}) {
        const auto path = dir / (std::string(to_string(name)) + ".tmpl");
        std::ifstream in(path);
        if (!in) continue;
        std::ostringstream buffer;
        buffer << in.rdbuf();
        auto tmpl = PromptTemplate::parse(buffer.str());
        if (tmpl.name() != name) invalid(path.string() + " declares a different template name");
        set(std::move(tmpl));
    }
}

void TemplateSet::set(PromptTemplate tmpl) {
    const auto name = tmpl.name();
    templates_.insert_or_assign(name, std::move(tmpl));
}

const PromptTemplate& TemplateSet::get(TemplateName name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(ErrorCode::template_invalid, std::string("no template ") + to_string(name));
    return it->second;
}

}  // namespace scribe
