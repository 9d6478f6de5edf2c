#include "relfix/promptparse.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace relfix {

std::string to_string(TemplateId t) {
    switch (t) {
        case TemplateId::TemporalCompare: return "temporal_compare";
        case TemplateId::SpatialCompare: return "spatial_compare";
        case TemplateId::SpatialWithContext: return "spatial_with_context";
        case TemplateId::KinshipInfer: return "kinship_infer";
        case TemplateId::InconsistencyDetect: return "inconsistency_detect";
    }
    throw DomainError("bad template enum");
}

TemplateId template_from_string(const std::string& s) {
    if (s == "temporal_compare") return TemplateId::TemporalCompare;
    if (s == "spatial_compare") return TemplateId::SpatialCompare;
    if (s == "spatial_with_context") return TemplateId::SpatialWithContext;
    if (s == "kinship_infer") return TemplateId::KinshipInfer;
    if (s == "inconsistency_detect") return TemplateId::InconsistencyDetect;
    throw DomainError("unknown template: " + s);
}

std::string PromptTask::task_id() const {
    std::ostringstream os;
    os << (dataset ? dataset->name : "?") << "|" << to_string(template_id) << "|" << pair.first
       << "|" << pair.second;
    return os.str();
}

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    return out;
}

std::string context_block(const Context* ctx) {
    if (!ctx || ctx->lines.empty()) return "";
    std::string out;
    for (const auto& l : ctx->lines) out += l + "\n";
    return out;
}

}  // namespace

std::string render_prompt(const PromptTask& task) {
    if (!task.dataset) throw DomainError("render_prompt: task has no dataset");
    if (task.pair.first == task.pair.second)
        throw DomainError("render_prompt: pair elements must be distinct");
    const std::string& a = task.pair.first;
    const std::string& b = task.pair.second;
    std::ostringstream os;
    switch (task.template_id) {
        case TemplateId::TemporalCompare: {
            os << "# Task: Date Comparison\n"
               << "Analyze the dates of " << a << " and " << b << ", then decide whether " << a
               << " is before or after " << b << ".\n\n"
               << "# Example Format:\n"
               << "## Step-by-step analysis:\n"
               << "... (detailed reasoning here) ...\n"
               << "## Answer:\n"
               << a << " is \\boxed{...} " << b << ".\n\n"
               << "# Important Notes:\n"
               << "- The answer should end with the sentence: '" << a << " is \\boxed{...} " << b
               << ".'\n"
               << "- The value inside the \\boxed{...} should be one of the following: "
               << join_labels(temporal_labels()) << ".\n"
               << "- The reasoning should be clear and consistent, with no conflicting "
                  "statements.\n";
            break;
        }
        case TemplateId::SpatialCompare:
        case TemplateId::SpatialWithContext:
        case TemplateId::InconsistencyDetect: {
            os << "# Task: Relative Position Analysis\n"
               << context_block(task.context) << "Analyze the relative position of " << a
               << " with respect to " << b << ".\n\n"
               << "# Example Format:\n"
               << "## Step-by-step analysis:\n"
               << "... (detailed reasoning here) ...\n\n"
               << "## Answer:\n"
               << a << " is \\boxed{...} of " << b << ".\n\n"
               << "# Important Notes:\n"
               << "- Answer format: '" << a << " is \\boxed{...} of " << b << ".'\n"
               << "- Use only: southeast, southwest, northeast, northwest.\n";
            if (task.template_id == TemplateId::InconsistencyDetect)
                os << "- If the given relationships contradict each other, answer "
                      "\\boxed{INCONSISTENT} instead.\n";
            os << "- The reasoning should be clear and consistent, with no conflicting "
                  "statements.\n";
            break;
        }
        case TemplateId::KinshipInfer: {
            os << "# Task: Family Relationship Analysis\n\n";
            int i = 1;
            for (const auto& s : task.dataset->seeds)
                os << i++ << ". " << s.subject << " is the " << s.label.label << " of "
                   << s.object << ".\n";
            os << "\nAnalyze the family relationship between " << a << " and " << b << ".\n\n"
               << "# Example Format:\n"
               << "## Step-by-step analysis:\n"
               << "... (detailed reasoning here) ...\n\n"
               << "## Answer:\n"
               << a << " is the \\boxed{...} of " << b << ".\n\n"
               << "# Important Notes:\n"
               << "- The answer should end with the sentence: '" << a << " is the \\boxed{...} of "
               << b << ".'\n"
               << "- The value inside the \\boxed{...} should be one of the following: "
               << join_labels(kinship_labels()) << ".\n"
               << "- The reasoning should be clear and consistent, with no conflicting "
                  "statements.\n";
            break;
        }
    }
    return os.str();
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

Domain template_domain(TemplateId t) {
    switch (t) {
        case TemplateId::TemporalCompare: return Domain::Temporal;
        case TemplateId::KinshipInfer: return Domain::Kinship;
        default: return Domain::Spatial;
    }
}

// Last occurrence of \boxed{...}; returns token position or npos.
std::pair<size_t, std::string> last_boxed(const std::string& raw) {
    const std::string marker = "\\boxed{";
    size_t pos = raw.rfind(marker);
    while (pos != std::string::npos) {
        size_t start = pos + marker.size();
        size_t end = raw.find('}', start);
        if (end != std::string::npos) {
            std::string tok = raw.substr(start, end - start);
            // Ignore the template's own placeholder.
            if (tok != "...") return {pos, tok};
        }
        if (pos == 0) break;
        pos = raw.rfind(marker, pos - 1);
    }
    return {std::string::npos, ""};
}

}  // namespace

ParseResult parse_response(const std::string& raw, const PromptTask& task) {
    ParseResult out;
    auto [pos, token] = last_boxed(raw);
    if (pos == std::string::npos) {
        out.failure = ParseFailure::NoBoxedAnswer;
        return out;
    }
    std::string label = lower(normalize_object_id(token));
    Domain domain = template_domain(task.template_id);
    if (task.template_id == TemplateId::InconsistencyDetect && lower(token) == "inconsistent") {
        out.inconsistent_flag = true;
        return out;
    }
    if (!label_in_domain(domain, label)) {
        out.failure = ParseFailure::LabelOutOfVocabulary;
        return out;
    }

    // The answer sentence normally names the objects around the boxed token.
    // If both appear and in reversed order, the model swapped them; parse
    // against the literal adjacency and flag the record.
    std::string subject = task.pair.first, object = task.pair.second;
    size_t line_start = raw.rfind('\n', pos);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    size_t line_end = raw.find('\n', pos);
    std::string line = raw.substr(line_start, (line_end == std::string::npos ? raw.size()
                                                                             : line_end) -
                                                  line_start);
    auto find_name = [&](const std::string& name) {
        // Whole-token match: "Object_1" must not hit inside "Object_12".
        size_t p = line.find(name);
        while (p != std::string::npos) {
            char next = p + name.size() < line.size() ? line[p + name.size()] : ' ';
            if (!(std::isalnum(static_cast<unsigned char>(next)) || next == '_')) return p;
            p = line.find(name, p + 1);
        }
        return p;
    };
    size_t pa = find_name(task.pair.first);
    size_t pb = find_name(task.pair.second);
    if (pa != std::string::npos && pb != std::string::npos && pb < pa) {
        std::swap(subject, object);
        out.reversed_pair = true;
    }

    RelationAssertion a;
    a.subject = subject;
    a.object = object;
    a.label = {domain, label};
    a.raw_text = raw;
    a.source = Source::Model;
    a.dataset = task.dataset ? task.dataset->name : "";
    out.assertion = a;
    return out;
}

std::vector<PromptTask> make_tasks(const Dataset& dataset, const Context* context,
                                   TemplateId template_id) {
    std::vector<PromptTask> tasks;
    for (const auto& a : dataset.objects)
        for (const auto& b : dataset.objects) {
            if (a == b) continue;
            PromptTask t;
            t.dataset = &dataset;
            t.pair = {a, b};
            t.context = context;
            t.template_id = template_id;
            tasks.push_back(t);
        }
    return tasks;
}

}  // namespace relfix
