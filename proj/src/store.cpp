#include "kbguard/store.hpp"

#include "kbguard/error.hpp"
#include "line_reader.hpp"

#include <fstream>
#include <mutex>
#include <stdexcept>

namespace kbguard {

Triple Triple::make(Term subject, Term predicate, Term object, KnowledgeClass kc) {
    if (!subject.is_iri()) throw std::invalid_argument("triple subject must be an IRI");
    if (!predicate.is_iri()) throw std::invalid_argument("triple predicate must be an IRI");
    return Triple{std::move(subject), std::move(predicate), std::move(object), kc};
}

void TripleStore::insert(const GraphName& graph, const Triple& t) {
    std::unique_lock lock(mutex_);
    // First writer wins on the knowledge class; the fact itself is a set member.
    graphs_[graph].emplace(TripleKey{t.subject, t.predicate, t.object}, t.knowledge_class);
}

std::size_t TripleStore::retract_graph(const GraphName& graph) {
    std::unique_lock lock(mutex_);
    auto it = graphs_.find(graph);
    if (it == graphs_.end()) return 0;
    std::size_t removed = it->second.size();
    graphs_.erase(it);
    return removed;
}

std::vector<Triple> TripleStore::match(const GraphName& graph,
                                       const TriplePattern& pattern) const {
    std::shared_lock lock(mutex_);
    std::vector<Triple> out;
    auto it = graphs_.find(graph);
    if (it == graphs_.end()) return out;
    for (const auto& [key, kc] : it->second) {
        Triple t{key.subject, key.predicate, key.object, kc};
        if (matches(t, pattern)) out.push_back(std::move(t));
    }
    return out;
}

std::size_t TripleStore::graph_size(const GraphName& graph) const {
    std::shared_lock lock(mutex_);
    auto it = graphs_.find(graph);
    return it == graphs_.end() ? 0 : it->second.size();
}

bool matches(const Triple& t, const TriplePattern& pattern) {
    auto pos = [](const TermOrVar& pat, const Term& val) {
        if (is_variable(pat)) return true;
        return *as_term(pat) == val;
    };
    return pos(pattern.subject, t.subject) && pos(pattern.predicate, t.predicate) &&
           pos(pattern.object, t.object);
}

namespace {

Term field_to_iri(const detail::Field& f, const std::string& file, int line_no,
                  const char* position) {
    if (f.quoted)
        throw LoadError(file, line_no, std::string(position) + " must be a bare IRI token");
    try {
        return Term::iri(f.text);
    } catch (const std::invalid_argument& e) {
        throw LoadError(file, line_no, e.what());
    }
}

} // namespace

std::size_t load_kb_file(TripleStore& store, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open KB file: " + path.string());
    const std::string file = path.string();
    const GraphName kb = GraphName::kb();
    const std::size_t before = store.graph_size(kb);

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_fields(line, file, line_no);
        if (fields.empty()) continue;
        if (fields.size() < 3 || fields.size() > 4)
            throw LoadError(file, line_no,
                            "expected <subject> <predicate> <object> [static|dynamic]");

        Term subject = field_to_iri(fields[0], file, line_no, "subject");
        Term predicate = field_to_iri(fields[1], file, line_no, "predicate");
        Term object;
        try {
            object = fields[2].quoted ? Term::literal(fields[2].text) : Term::iri(fields[2].text);
        } catch (const std::invalid_argument& e) {
            throw LoadError(file, line_no, e.what());
        }

        KnowledgeClass kc = KnowledgeClass::Static;
        if (fields.size() == 4) {
            if (fields[3].text == "static")
                kc = KnowledgeClass::Static;
            else if (fields[3].text == "dynamic")
                kc = KnowledgeClass::Dynamic;
            else
                throw LoadError(file, line_no,
                                "knowledge class must be 'static' or 'dynamic', got '" +
                                    fields[3].text + "'");
        }
        store.insert(kb, Triple::make(std::move(subject), std::move(predicate),
                                      std::move(object), kc));
    }
    return store.graph_size(kb) - before;
}

std::string to_string(const GraphName& g) {
    switch (g.kind) {
        case GraphName::Kind::Kb: return "KB";
        case GraphName::Kind::Ontology: return "Ontology";
        case GraphName::Kind::AuthProfile: return "AuthProfile(" + g.agent_id + ")";
    }
    return "?";
}

std::string to_string(KnowledgeClass kc) {
    return kc == KnowledgeClass::Static ? "static" : "dynamic";
}

} // namespace kbguard
