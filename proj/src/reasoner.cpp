#include "kbguard/reasoner.hpp"

#include "kbguard/error.hpp"
#include "kbguard/session.hpp"
#include "line_reader.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

namespace kbguard {

RoleName RoleName::named(std::string name) {
    if (name.empty()) throw std::invalid_argument("role name must be non-empty");
    return RoleName{std::move(name)};
}

namespace {

enum class Mark { Unvisited, InProgress, Done };

void visit(const Term& node, const std::map<Term, std::vector<Term>>& parents_of,
           std::map<Term, Mark>& marks) {
    Mark& m = marks[node];
    if (m == Mark::Done) return;
    if (m == Mark::InProgress)
        throw CycleError("sub-property hierarchy contains a cycle through '" + node.text + "'");
    m = Mark::InProgress;
    auto it = parents_of.find(node);
    if (it != parents_of.end()) {
        for (const Term& parent : it->second) visit(parent, parents_of, marks);
    }
    marks[node] = Mark::Done;
}

} // namespace

void validate_acyclic(const Ontology& o) {
    std::map<Term, std::vector<Term>> parents_of;
    for (const auto& [child, parent] : o.sub_property_edges)
        parents_of[child].push_back(parent);
    std::map<Term, Mark> marks;
    for (const auto& [child, parent] : o.sub_property_edges) {
        visit(child, parents_of, marks);
        visit(parent, parents_of, marks);
    }
}

std::set<Term> closure(const std::set<Term>& granted, const Ontology& o) {
    validate_acyclic(o);

    std::map<Term, std::vector<Term>> children_of;
    for (const auto& [child, parent] : o.sub_property_edges)
        children_of[parent].push_back(child);

    // CanAccess(A, p) <- CanAccess(A, q) AND subPropertyOf(p, q), to fixpoint.
    std::set<Term> out = granted;
    std::deque<Term> worklist(granted.begin(), granted.end());
    while (!worklist.empty()) {
        Term current = std::move(worklist.front());
        worklist.pop_front();
        auto it = children_of.find(current);
        if (it == children_of.end()) continue;
        for (const Term& child : it->second) {
            if (out.insert(child).second) worklist.push_back(child);
        }
    }
    return out;
}

bool inference_check(const AuthProfile& agent, const Term& p, const Ontology& o) {
    return closure(agent.granted, o).count(p) > 0;
}

AuthProfile load_profile(const TripleStore& store, const std::string& agent_id,
                         RoleName role) {
    AuthProfile profile{agent_id, {}, std::move(role)};
    TriplePattern grants{Term::iri(agent_id), vocab::can_access(), Variable::named("p")};
    for (const Triple& t : store.match(GraphName::auth_profile(agent_id), grants))
        profile.granted.insert(t.object);
    return profile;
}

bool auth_decision(const Session& session, const TripleStore& store,
                   const TermOrVar& subject, const Term& predicate,
                   const TermOrVar& object, const Ontology& onto,
                   std::chrono::system_clock::time_point now) {
    (void)subject;
    (void)object;
    if (session.state != SessionState::Active) return false;
    if (now >= session.expires_at) return false;
    if (session.agent.role.name.empty()) return false;
    AuthProfile profile =
        load_profile(store, session.agent.agent_id, session.agent.role);
    return inference_check(profile, predicate, onto);
}

Ontology load_ontology_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open ontology file: " + path.string());
    const std::string file = path.string();

    Ontology o;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_fields(line, file, line_no);
        if (fields.empty()) continue;
        for (const auto& f : fields) {
            if (f.quoted)
                throw LoadError(file, line_no, "ontology entries use bare tokens only");
        }
        if (fields[0].text == "sub") {
            if (fields.size() != 3)
                throw LoadError(file, line_no, "expected: sub <child> <parent>");
            try {
                o.sub_property_edges.emplace(Term::iri(fields[1].text),
                                             Term::iri(fields[2].text));
            } catch (const std::invalid_argument& e) {
                throw LoadError(file, line_no, e.what());
            }
        } else if (fields[0].text == "admin-scope") {
            if (fields.size() != 2)
                throw LoadError(file, line_no, "expected: admin-scope <role>");
            o.admin_scopes.insert(RoleName::named(fields[1].text));
        } else {
            throw LoadError(file, line_no,
                            "unknown directive '" + fields[0].text +
                                "' (expected 'sub' or 'admin-scope')");
        }
    }
    validate_acyclic(o);
    return o;
}

} // namespace kbguard
