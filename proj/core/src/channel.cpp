#include "skyline/channel.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

namespace sky {

Frame DirectChannel::recv(std::chrono::milliseconds) {
  if (pending_.empty()) throw ProtocolError("no pending response on direct channel");
  Frame f = std::move(pending_.front());
  pending_.pop_front();
  return f;
}

std::pair<std::shared_ptr<LoopbackChannel>, std::shared_ptr<LoopbackChannel>>
LoopbackChannel::make_pair() {
  auto a = std::shared_ptr<LoopbackChannel>(new LoopbackChannel());
  auto b = std::shared_ptr<LoopbackChannel>(new LoopbackChannel());
  a->in_ = std::make_shared<Queue>();
  a->out_ = std::make_shared<Queue>();
  b->in_ = a->out_;
  b->out_ = a->in_;
  return {a, b};
}

void LoopbackChannel::send(const Frame& f) {
  std::lock_guard lk(out_->mx);
  if (out_->closed) throw ProtocolError("channel closed");
  out_->q.push_back(f);
  out_->cv.notify_one();
}

Frame LoopbackChannel::recv(std::chrono::milliseconds timeout) {
  std::unique_lock lk(in_->mx);
  if (!in_->cv.wait_for(lk, timeout, [&] { return !in_->q.empty() || in_->closed; }))
    throw TimeoutError("recv timeout");
  if (in_->q.empty()) throw ProtocolError("channel closed");
  Frame f = std::move(in_->q.front());
  in_->q.pop_front();
  return f;
}

void LoopbackChannel::close() {
  for (auto& q : {in_, out_}) {
    std::lock_guard lk(q->mx);
    q->closed = true;
    q->cv.notify_all();
  }
}

TcpChannel::TcpChannel(int fd) : fd_(fd) {
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_KEEPALIVE, &one, sizeof(one));
  setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpChannel::~TcpChannel() { close(); }

std::unique_ptr<TcpChannel> TcpChannel::connect(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string port_s = std::to_string(port);
  if (getaddrinfo(host.c_str(), port_s.c_str(), &hints, &res) != 0)
    throw ProtocolError("cannot resolve " + host);
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  freeaddrinfo(res);
  if (fd < 0) throw ProtocolError("cannot connect to " + host + ":" + port_s);
  return std::make_unique<TcpChannel>(fd);
}

void TcpChannel::send(const Frame& f) {
  auto bytes = encode_frame(f);
  std::lock_guard lk(send_mx_);
  size_t off = 0;
  while (off < bytes.size()) {
    ssize_t w = ::send(fd_, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (w <= 0) throw ProtocolError("tcp send failed");
    off += static_cast<size_t>(w);
  }
}

Frame TcpChannel::recv(std::chrono::milliseconds timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    if (auto f = parser_.next()) return *f;
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) throw TimeoutError("recv timeout");
    pollfd pfd{fd_, POLLIN, 0};
    auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    int pr = ::poll(&pfd, 1, static_cast<int>(wait.count()));
    if (pr == 0) throw TimeoutError("recv timeout");
    if (pr < 0) throw ProtocolError("poll failed");
    uint8_t buf[65536];
    ssize_t r = ::read(fd_, buf, sizeof(buf));
    if (r == 0) throw ProtocolError("connection closed by peer");
    if (r < 0) throw ProtocolError("tcp read failed");
    parser_.feed({buf, static_cast<size_t>(r)});
  }
}

void TcpChannel::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw ProtocolError("cannot create listening socket");
  int one = 1;
  setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    throw ProtocolError("cannot bind port " + std::to_string(port));
  }
  if (listen(fd_, 64) != 0) {
    ::close(fd_);
    throw ProtocolError("listen failed");
  }
  socklen_t len = sizeof(addr);
  getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() { close(); }

std::unique_ptr<TcpChannel> TcpListener::accept() {
  int cfd = ::accept(fd_, nullptr, nullptr);
  if (cfd < 0) throw ProtocolError("accept failed");
  return std::make_unique<TcpChannel>(cfd);
}

void TcpListener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

Frame rpc(Channel& chan, const Frame& request, std::chrono::milliseconds timeout) {
  MsgType want = response_of(request.type);
  chan.send(request);
  auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) throw TimeoutError("rpc timeout");
    Frame resp = chan.recv(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now));
    if (resp.session != request.session) continue;  // foreign session: discard
    if (resp.type == MsgType::ERROR) throw_error_frame(resp);
    if (resp.type != want)
      throw ProtocolError(std::string("unexpected response type ") + msg_type_name(resp.type));
    return resp;
  }
}

class SessionMux::View final : public Channel {
 public:
  View(SessionMux* mux, SessionId session, std::shared_ptr<Inbox> inbox)
      : mux_(mux), session_(session), inbox_(std::move(inbox)) {}
  void send(const Frame& f) override {
    std::lock_guard lk(mux_->send_mx_);
    mux_->base_->send(f);
  }
  Frame recv(std::chrono::milliseconds timeout) override {
    std::unique_lock lk(inbox_->mx);
    if (!inbox_->cv.wait_for(lk, timeout, [&] { return !inbox_->q.empty() || inbox_->dead; }))
      throw TimeoutError("recv timeout");
    if (inbox_->q.empty()) throw ProtocolError("mux stopped");
    Frame f = std::move(inbox_->q.front());
    inbox_->q.pop_front();
    return f;
  }
  void close() override {}

 private:
  SessionMux* mux_;
  SessionId session_;
  std::shared_ptr<Inbox> inbox_;
};

SessionMux::SessionMux(std::shared_ptr<Channel> base) : base_(std::move(base)) {
  reader_ = std::thread([this] {
    try {
      for (;;) {
        Frame f = base_->recv(std::chrono::hours(24));
        std::shared_ptr<Inbox> inbox;
        {
          std::lock_guard lk(map_mx_);
          auto it = inboxes_.find(f.session);
          if (it != inboxes_.end()) inbox = it->second;
        }
        if (!inbox) continue;  // unknown session: discard
        std::lock_guard lk(inbox->mx);
        inbox->q.push_back(std::move(f));
        inbox->cv.notify_one();
      }
    } catch (const std::exception&) {
      std::lock_guard lk(map_mx_);
      for (auto& [id, inbox] : inboxes_) {
        std::lock_guard ilk(inbox->mx);
        inbox->dead = true;
        inbox->cv.notify_all();
      }
    }
  });
}

SessionMux::~SessionMux() { shutdown(); }

std::shared_ptr<Channel> SessionMux::open(const SessionId& session) {
  auto inbox = std::make_shared<Inbox>();
  {
    std::lock_guard lk(map_mx_);
    inboxes_[session] = inbox;
  }
  return std::make_shared<View>(this, session, inbox);
}

void SessionMux::shutdown() {
  if (!stopping_) {
    stopping_ = true;
    base_->close();
  }
  if (reader_.joinable()) reader_.join();
}

void TimingChannel::send(const Frame& f) {
  auto t0 = std::chrono::steady_clock::now();
  inner_->send(f);
  ns_ += std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
             .count();
}

Frame TimingChannel::recv(std::chrono::milliseconds timeout) {
  auto t0 = std::chrono::steady_clock::now();
  Frame f = inner_->recv(timeout);
  ns_ += std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0)
             .count();
  return f;
}

}  // namespace sky
