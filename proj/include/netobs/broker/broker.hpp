#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netobs/broker/frame.hpp"

namespace netobs::broker {

/// One attached endpoint: a local client or a link to another broker.
/// deliver() moves a frame toward the remote side of the session.
class Session {
public:
    virtual ~Session() = default;
    virtual void deliver(const Frame& frame) = 0;
    virtual std::string describe() const { return "session"; }
};

using SessionPtr = std::shared_ptr<Session>;

/// Routing node of the messaging fabric. Clients register names,
/// brokers form a tree; point-to-point frames route by name, publish
/// frames by topic, both staying as local as the destination allows.
///
/// Broker links reuse SUB/UNSUB as advertisement carriers with a
/// `name:` or `topic:` prefix on the destination field: children push
/// registered names and aggregate topic interests upward, parents push
/// the rest-of-tree interests downward. A publication crosses a link
/// only when a matching subscriber exists beyond it.
class Broker {
public:
    explicit Broker(std::string id);

    /// Full dispatch for one inbound frame (from a client session or a
    /// broker link).
    void handle_frame(const SessionPtr& from, const Frame& frame);

    /// Attach the given session as a child broker link.
    void attach_child(const SessionPtr& link, const std::string& child_id);

    /// Attach the given session as the parent uplink.
    void attach_parent(const SessionPtr& link);

    /// Remove a closed session; names and subscriptions are withdrawn.
    void detach(const SessionPtr& session);

    const std::string& id() const { return id_; }
    bool knows_name(const std::string& name) const;
    std::vector<std::string> local_names() const;
    std::size_t local_client_count() const;

private:
    struct ChildLink {
        SessionPtr session;
        std::string broker_id;
        std::set<std::string> names;      // advertised from below
        std::set<std::string> interests;  // patterns wanted below
    };

    std::string id_;
    mutable std::recursive_mutex mu_;

    std::map<std::string, SessionPtr> locals_;
    std::map<Session*, std::string> names_by_session_;
    std::map<Session*, std::set<std::string>> local_subs_;  // client -> patterns
    std::map<Session*, ChildLink> children_;
    SessionPtr parent_;
    std::set<std::string> parent_interests_;  // wanted beyond the uplink
    std::map<std::string, std::string> tenants_;  // logged, not enforced

    void handle_hello(const SessionPtr& from, const Frame& frame);
    void handle_send(const SessionPtr& from, Frame frame);
    void handle_pub(const SessionPtr& from, const Frame& frame);
    void handle_sub(const SessionPtr& from, const Frame& frame, bool subscribe);
    void handle_link_advert(const SessionPtr& from, const Frame& frame, bool add);

    void route_error(const SessionPtr& via_hint, const std::string& to,
                     const std::string& correlation, const std::string& reason);
    void send_error_to(const SessionPtr& session, const std::string& to,
                       const std::string& correlation, const std::string& reason);

    bool is_child(Session* s) const { return children_.count(s) > 0; }
    bool is_parent(Session* s) const { return parent_ && parent_.get() == s; }

    // aggregate interest bookkeeping
    std::set<std::string> aggregate_interests_locked() const;
    std::set<std::string> outward_interests_for_child_locked(Session* child) const;
    void advertise_name_up_locked(const std::string& name, bool add);
    void refresh_interest_up_locked();
    void refresh_interests_down_locked();

    std::set<std::string> last_up_interests_;
    std::map<Session*, std::set<std::string>> last_down_interests_;
};

// ---------------------------------------------------------------------------
// In-process plumbing for tests and the simulator. Delivery is
// synchronous and deterministic.

class Broker;

/// Client endpoint attached to an in-process broker.
class InProcClient {
public:
    InProcClient(Broker& broker, std::string name, std::string tenant = "");
    ~InProcClient();
    InProcClient(const InProcClient&) = delete;
    InProcClient& operator=(const InProcClient&) = delete;

    bool connected() const { return connected_; }

    void send(const std::string& to, const std::string& payload,
              const std::string& correlation = "");
    void publish(const std::string& topic, const std::string& payload);
    void subscribe(const std::string& pattern);
    void unsubscribe(const std::string& pattern);
    void bye();

    /// Received DELIVER / DELIVER_PUB / ERROR frames, arrival order.
    std::vector<Frame> drain();
    const std::string& name() const { return name_; }

    /// Called for every inbound frame, before it lands in the inbox.
    std::function<void(const Frame&)> on_frame;

    struct Inbox;  // implementation detail shared with the session glue

private:
    Broker& broker_;
    std::string name_;
    std::shared_ptr<Inbox> inbox_;
    SessionPtr session_;
    bool connected_ = false;
};

/// Per-direction frame log of an in-process broker link; the harness
/// asserts locality from these.
struct LinkLog {
    std::vector<Frame> frames;
    std::size_t count(Command c) const;
    /// SEND/DELIVER/PUB/DELIVER_PUB/ERROR frames (excludes the
    /// advertisement and liveness traffic).
    std::size_t message_count() const;
};

/// Connects a child broker under a parent, keeping per-direction logs.
class InProcBrokerLink {
public:
    InProcBrokerLink(Broker& parent, Broker& child);
    ~InProcBrokerLink();

    LinkLog& up_log() { return *up_log_; }      // child -> parent
    LinkLog& down_log() { return *down_log_; }  // parent -> child

private:
    Broker& parent_;
    Broker& child_;
    std::shared_ptr<LinkLog> up_log_, down_log_;
    SessionPtr at_parent_;  // parent's session for the child
    SessionPtr at_child_;   // child's session for the parent
};

} // namespace netobs::broker
