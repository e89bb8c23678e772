#include "netobs/broker/broker.hpp"

#include <algorithm>
#include <cstring>

namespace netobs::broker {

namespace {

constexpr const char* kNamePrefix = "name:";
constexpr const char* kTopicPrefix = "topic:";

bool strip_prefix(const std::string& s, const char* prefix, std::string& rest) {
    std::size_t n = std::strlen(prefix);
    if (s.compare(0, n, prefix) != 0) return false;
    rest = s.substr(n);
    return true;
}

} // namespace

Broker::Broker(std::string id) : id_(std::move(id)) {}

bool Broker::knows_name(const std::string& name) const {
    std::lock_guard lock(mu_);
    if (locals_.count(name)) return true;
    for (const auto& [s, link] : children_) {
        (void)s;
        if (link.names.count(name)) return true;
    }
    return false;
}

std::vector<std::string> Broker::local_names() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [name, s] : locals_) {
        (void)s;
        out.push_back(name);
    }
    return out;
}

std::size_t Broker::local_client_count() const {
    std::lock_guard lock(mu_);
    return locals_.size();
}

void Broker::handle_frame(const SessionPtr& from, const Frame& frame) {
    switch (frame.command) {
        case Command::Hello:
            handle_hello(from, frame);
            return;
        case Command::Send:
            handle_send(from, frame);
            return;
        case Command::Pub:
            handle_pub(from, frame);
            return;
        case Command::Sub:
        case Command::Unsub: {
            bool add = frame.command == Command::Sub;
            std::lock_guard lock(mu_);
            if (is_child(from.get()) || is_parent(from.get()))
                handle_link_advert(from, frame, add);
            else
                handle_sub(from, frame, add);
            return;
        }
        case Command::Ping: {
            Frame pong;
            pong.command = Command::Pong;
            pong.source = id_;
            pong.correlation = frame.correlation;
            from->deliver(pong);
            return;
        }
        case Command::Bye:
            detach(from);
            return;
        case Command::Deliver:
        case Command::DeliverPub:
        case Command::Error:
            // Inter-broker forwarding arrives as SEND/PUB; delivery
            // commands terminate at clients. ERROR routes like SEND.
            if (frame.command == Command::Error) {
                std::lock_guard lock(mu_);
                route_error(from, frame.destination, frame.correlation, frame.payload);
            }
            return;
        case Command::HelloOk:
        case Command::Pong:
            return;
    }
}

void Broker::handle_hello(const SessionPtr& from, const Frame& frame) {
    std::lock_guard lock(mu_);
    const std::string& name = frame.source;
    if (!valid_client_name(name)) {
        send_error_to(from, name, frame.correlation, "InvalidName");
        return;
    }
    if (locals_.count(name)) {
        send_error_to(from, name, frame.correlation, "NameTaken");
        return;
    }
    locals_[name] = from;
    names_by_session_[from.get()] = name;
    if (!frame.payload.empty()) tenants_[name] = frame.payload;

    Frame ok;
    ok.command = Command::HelloOk;
    ok.source = id_;
    ok.destination = name;
    ok.correlation = frame.correlation;
    from->deliver(ok);

    advertise_name_up_locked(name, true);
}

void Broker::handle_send(const SessionPtr& from, Frame frame) {
    std::lock_guard lock(mu_);
    const std::string& to = frame.destination;

    auto lit = locals_.find(to);
    if (lit != locals_.end()) {
        Frame deliver = frame;
        deliver.command = Command::Deliver;
        lit->second->deliver(deliver);
        return;
    }
    for (auto& [s, link] : children_) {
        (void)s;
        if (link.names.count(to)) {
            link.session->deliver(frame);
            return;
        }
    }
    if (parent_ && !is_parent(from.get())) {
        parent_->deliver(frame);
        return;
    }
    route_error(from, frame.source, frame.correlation,
                "UnknownDestination " + to);
}

void Broker::handle_pub(const SessionPtr& from, const Frame& frame) {
    std::lock_guard lock(mu_);
    const std::string& topic = frame.destination;

    // Local subscribers: at most one DELIVER_PUB per client even when
    // several of its patterns match. A client subscribed to its own
    // publication topic receives it like any other subscriber.
    std::set<Session*> hit;
    for (const auto& [client, patterns] : local_subs_) {
        for (const auto& p : patterns) {
            if (topic_matches(p, topic)) {
                hit.insert(client);
                break;
            }
        }
    }
    for (Session* client : hit) {
        auto nit = names_by_session_.find(client);
        if (nit == names_by_session_.end()) continue;
        auto sit = locals_.find(nit->second);
        if (sit == locals_.end()) continue;
        Frame deliver = frame;
        deliver.command = Command::DeliverPub;
        sit->second->deliver(deliver);
    }

    for (auto& [s, link] : children_) {
        if (s == from.get()) continue;
        bool interested = false;
        for (const auto& p : link.interests)
            if (topic_matches(p, topic)) { interested = true; break; }
        if (interested) link.session->deliver(frame);
    }

    if (parent_ && !is_parent(from.get())) {
        bool interested = false;
        for (const auto& p : parent_interests_)
            if (topic_matches(p, topic)) { interested = true; break; }
        if (interested) parent_->deliver(frame);
    }
}

void Broker::handle_sub(const SessionPtr& from, const Frame& frame, bool add) {
    const std::string& pattern = frame.destination;
    if (!valid_pattern(pattern)) {
        send_error_to(from, frame.source, frame.correlation, "InvalidPattern");
        return;
    }
    if (add)
        local_subs_[from.get()].insert(pattern);
    else {
        auto it = local_subs_.find(from.get());
        if (it != local_subs_.end()) {
            it->second.erase(pattern);
            if (it->second.empty()) local_subs_.erase(it);
        }
    }
    refresh_interest_up_locked();
    refresh_interests_down_locked();
}

void Broker::handle_link_advert(const SessionPtr& from, const Frame& frame, bool add) {
    std::string rest;
    if (strip_prefix(frame.destination, kNamePrefix, rest)) {
        auto cit = children_.find(from.get());
        if (cit == children_.end()) return;  // names only flow upward
        if (add)
            cit->second.names.insert(rest);
        else
            cit->second.names.erase(rest);
        advertise_name_up_locked(rest, add);
        return;
    }
    if (strip_prefix(frame.destination, kTopicPrefix, rest)) {
        if (is_parent(from.get())) {
            if (add)
                parent_interests_.insert(rest);
            else
                parent_interests_.erase(rest);
            refresh_interests_down_locked();
            return;
        }
        auto cit = children_.find(from.get());
        if (cit == children_.end()) return;
        if (add)
            cit->second.interests.insert(rest);
        else
            cit->second.interests.erase(rest);
        refresh_interest_up_locked();
        refresh_interests_down_locked();
        return;
    }
}

void Broker::route_error(const SessionPtr& via_hint, const std::string& to,
                         const std::string& correlation, const std::string& reason) {
    auto lit = locals_.find(to);
    if (lit != locals_.end()) {
        send_error_to(lit->second, to, correlation, reason);
        return;
    }
    for (auto& [s, link] : children_) {
        (void)s;
        if (link.names.count(to)) {
            Frame err;
            err.command = Command::Error;
            err.source = id_;
            err.destination = to;
            err.correlation = correlation;
            err.payload = reason;
            link.session->deliver(err);
            return;
        }
    }
    if (parent_ && (!via_hint || parent_.get() != via_hint.get())) {
        Frame err;
        err.command = Command::Error;
        err.source = id_;
        err.destination = to;
        err.correlation = correlation;
        err.payload = reason;
        parent_->deliver(err);
        return;
    }
    // No route back to the complainant; drop.
}

void Broker::send_error_to(const SessionPtr& session, const std::string& to,
                           const std::string& correlation, const std::string& reason) {
    Frame err;
    err.command = Command::Error;
    err.source = id_;
    err.destination = to;
    err.correlation = correlation;
    err.payload = reason;
    session->deliver(err);
}

void Broker::attach_child(const SessionPtr& link, const std::string& child_id) {
    std::lock_guard lock(mu_);
    ChildLink cl;
    cl.session = link;
    cl.broker_id = child_id;
    children_[link.get()] = std::move(cl);
    // Tell the child what the rest of the tree currently wants.
    refresh_interests_down_locked();
}

void Broker::attach_parent(const SessionPtr& link) {
    std::lock_guard lock(mu_);
    parent_ = link;
    last_up_interests_.clear();
    // Advertise everything we already know upward.
    for (const auto& [name, s] : locals_) {
        (void)s;
        Frame adv;
        adv.command = Command::Sub;
        adv.source = id_;
        adv.destination = kNamePrefix + name;
        parent_->deliver(adv);
    }
    for (const auto& [s, link2] : children_) {
        (void)s;
        for (const auto& name : link2.names) {
            Frame adv;
            adv.command = Command::Sub;
            adv.source = id_;
            adv.destination = kNamePrefix + name;
            parent_->deliver(adv);
        }
    }
    refresh_interest_up_locked();
}

void Broker::detach(const SessionPtr& session) {
    std::lock_guard lock(mu_);
    Session* s = session.get();

    auto nit = names_by_session_.find(s);
    if (nit != names_by_session_.end()) {
        std::string name = nit->second;
        locals_.erase(name);
        names_by_session_.erase(nit);
        tenants_.erase(name);
        advertise_name_up_locked(name, false);
    }
    if (local_subs_.erase(s)) {
        refresh_interest_up_locked();
        refresh_interests_down_locked();
    }
    auto cit = children_.find(s);
    if (cit != children_.end()) {
        for (const auto& name : cit->second.names)
            advertise_name_up_locked(name, false);
        children_.erase(cit);
        last_down_interests_.erase(s);
        refresh_interest_up_locked();
        refresh_interests_down_locked();
    }
    if (is_parent(s)) {
        parent_.reset();
        parent_interests_.clear();
        refresh_interests_down_locked();
    }
}

std::set<std::string> Broker::aggregate_interests_locked() const {
    std::set<std::string> out;
    for (const auto& [client, patterns] : local_subs_) {
        (void)client;
        out.insert(patterns.begin(), patterns.end());
    }
    for (const auto& [s, link] : children_) {
        (void)s;
        out.insert(link.interests.begin(), link.interests.end());
    }
    return out;
}

std::set<std::string> Broker::outward_interests_for_child_locked(Session* child) const {
    std::set<std::string> out;
    for (const auto& [client, patterns] : local_subs_) {
        (void)client;
        out.insert(patterns.begin(), patterns.end());
    }
    for (const auto& [s, link] : children_) {
        if (s == child) continue;
        out.insert(link.interests.begin(), link.interests.end());
    }
    out.insert(parent_interests_.begin(), parent_interests_.end());
    return out;
}

void Broker::advertise_name_up_locked(const std::string& name, bool add) {
    if (!parent_) return;
    Frame adv;
    adv.command = add ? Command::Sub : Command::Unsub;
    adv.source = id_;
    adv.destination = kNamePrefix + name;
    parent_->deliver(adv);
}

void Broker::refresh_interest_up_locked() {
    if (!parent_) return;
    std::set<std::string> now = aggregate_interests_locked();
    for (const auto& p : now) {
        if (!last_up_interests_.count(p)) {
            Frame adv;
            adv.command = Command::Sub;
            adv.source = id_;
            adv.destination = kTopicPrefix + p;
            parent_->deliver(adv);
        }
    }
    for (const auto& p : last_up_interests_) {
        if (!now.count(p)) {
            Frame adv;
            adv.command = Command::Unsub;
            adv.source = id_;
            adv.destination = kTopicPrefix + p;
            parent_->deliver(adv);
        }
    }
    last_up_interests_ = std::move(now);
}

void Broker::refresh_interests_down_locked() {
    for (auto& [s, link] : children_) {
        std::set<std::string> now = outward_interests_for_child_locked(s);
        auto& last = last_down_interests_[s];
        for (const auto& p : now) {
            if (!last.count(p)) {
                Frame adv;
                adv.command = Command::Sub;
                adv.source = id_;
                adv.destination = kTopicPrefix + p;
                link.session->deliver(adv);
            }
        }
        for (const auto& p : last) {
            if (!now.count(p)) {
                Frame adv;
                adv.command = Command::Unsub;
                adv.source = id_;
                adv.destination = kTopicPrefix + p;
                link.session->deliver(adv);
            }
        }
        last = std::move(now);
    }
}

// ---------------------------------------------------------------------------
// In-process plumbing

struct InProcClient::Inbox {
    std::vector<Frame> frames;
    std::function<void(const Frame&)>* hook = nullptr;
};

namespace {

class InboxSession : public Session {
public:
    explicit InboxSession(std::shared_ptr<InProcClient::Inbox> inbox)
        : inbox_(std::move(inbox)) {}
    void deliver(const Frame& frame) override {
        if (inbox_->hook && *inbox_->hook) (*inbox_->hook)(frame);
        inbox_->frames.push_back(frame);
    }

private:
    std::shared_ptr<InProcClient::Inbox> inbox_;
};

} // namespace

InProcClient::InProcClient(Broker& broker, std::string name, std::string tenant)
    : broker_(broker), name_(std::move(name)), inbox_(std::make_shared<Inbox>()) {
    inbox_->hook = &on_frame;
    session_ = std::make_shared<InboxSession>(inbox_);
    Frame hello;
    hello.command = Command::Hello;
    hello.source = name_;
    hello.payload = std::move(tenant);
    broker_.handle_frame(session_, hello);
    // HELLO_OK or ERROR lands in the inbox synchronously.
    for (const auto& f : inbox_->frames)
        if (f.command == Command::HelloOk) connected_ = true;
    inbox_->frames.clear();
}

InProcClient::~InProcClient() {
    if (connected_) broker_.detach(session_);
}

void InProcClient::send(const std::string& to, const std::string& payload,
                        const std::string& correlation) {
    Frame f;
    f.command = Command::Send;
    f.source = name_;
    f.destination = to;
    f.correlation = correlation;
    f.payload = payload;
    broker_.handle_frame(session_, f);
}

void InProcClient::publish(const std::string& topic, const std::string& payload) {
    Frame f;
    f.command = Command::Pub;
    f.source = name_;
    f.destination = topic;
    f.payload = payload;
    broker_.handle_frame(session_, f);
}

void InProcClient::subscribe(const std::string& pattern) {
    Frame f;
    f.command = Command::Sub;
    f.source = name_;
    f.destination = pattern;
    broker_.handle_frame(session_, f);
}

void InProcClient::unsubscribe(const std::string& pattern) {
    Frame f;
    f.command = Command::Unsub;
    f.source = name_;
    f.destination = pattern;
    broker_.handle_frame(session_, f);
}

void InProcClient::bye() {
    if (!connected_) return;
    Frame f;
    f.command = Command::Bye;
    f.source = name_;
    broker_.handle_frame(session_, f);
    connected_ = false;
}

std::vector<Frame> InProcClient::drain() {
    std::vector<Frame> out;
    out.swap(inbox_->frames);
    return out;
}

std::size_t LinkLog::count(Command c) const {
    std::size_t n = 0;
    for (const auto& f : frames)
        if (f.command == c) ++n;
    return n;
}

std::size_t LinkLog::message_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) {
        switch (f.command) {
            case Command::Send:
            case Command::Deliver:
            case Command::Pub:
            case Command::DeliverPub:
            case Command::Error:
                ++n;
                break;
            default:
                break;
        }
    }
    return n;
}

namespace {

/// Session whose remote end is another in-process broker: delivery is a
/// synchronous call into the peer's dispatcher, recorded in a log.
class PeerBrokerSession : public Session {
public:
    PeerBrokerSession(Broker& peer, std::shared_ptr<LinkLog> log)
        : peer_(peer), log_(std::move(log)) {}

    void bind(SessionPtr self_at_peer) { self_at_peer_ = std::move(self_at_peer); }

    void deliver(const Frame& frame) override {
        log_->frames.push_back(frame);
        peer_.handle_frame(self_at_peer_, frame);
    }

private:
    Broker& peer_;
    std::shared_ptr<LinkLog> log_;
    SessionPtr self_at_peer_;
};

} // namespace

InProcBrokerLink::InProcBrokerLink(Broker& parent, Broker& child)
    : parent_(parent), child_(child),
      up_log_(std::make_shared<LinkLog>()), down_log_(std::make_shared<LinkLog>()) {
    // at_child_: held by the child broker, forwards up into the parent.
    auto up = std::make_shared<PeerBrokerSession>(parent, up_log_);
    auto down = std::make_shared<PeerBrokerSession>(child, down_log_);
    at_child_ = up;
    at_parent_ = down;
    up->bind(at_parent_);
    down->bind(at_child_);
    parent_.attach_child(at_parent_, child_.id());
    child_.attach_parent(at_child_);
}

InProcBrokerLink::~InProcBrokerLink() {
    parent_.detach(at_parent_);
    child_.detach(at_child_);
}

} // namespace netobs::broker
