import pytest
import requests

from chaoscycle.agents.roles import AgentCall
from chaoscycle.agents.services.http_backend import HttpChatBackend
from chaoscycle.core.enums import AgentRole
from chaoscycle.core.exceptions import BackendUnavailable
from chaoscycle.core.exceptions import ConfigurationError

CALL = AgentCall(role=AgentRole.APP_GUESSER)


class FakeResponse:
    def __init__(self, payload, status=200):
        self.payload = payload
        self.status = status

    def raise_for_status(self):
        if self.status >= 400:  # noqa: PLR2004
            raise requests.exceptions.HTTPError(f"{self.status} error")

    def json(self):
        return self.payload


@pytest.fixture
def backend(monkeypatch):
    monkeypatch.setenv("CHAOS_TEST_KEY", "sk-test")
    return HttpChatBackend("https://llm.example.com/v1/", "gpt-test", api_key_env="CHAOS_TEST_KEY")


def reply_with(monkeypatch, response):
    sent = {}

    def post(url, json, headers, timeout):
        sent.update(url=url, json=json, headers=headers)
        if isinstance(response, Exception):
            raise response
        return response

    monkeypatch.setattr(requests, "post", post)
    return sent


def test_needs_an_api_key(monkeypatch):
    monkeypatch.delenv("CHAOS_MISSING_KEY", raising=False)
    with pytest.raises(ConfigurationError, match="CHAOS_MISSING_KEY"):
        HttpChatBackend("https://llm.example.com", "gpt-test", api_key_env="CHAOS_MISSING_KEY")


def test_needs_a_model():
    with pytest.raises(ConfigurationError):
        HttpChatBackend("https://llm.example.com", "")


def test_completion(backend, monkeypatch):
    payload = {
        "choices": [{"message": {"content": '{"application": "nginx"}'}}],
        "usage": {"prompt_tokens": 42, "completion_tokens": 7},
    }
    sent = reply_with(monkeypatch, FakeResponse(payload))
    reply = backend.complete(CALL, 1, [{"role": "user", "content": "hi"}])
    assert reply.text == '{"application": "nginx"}'
    assert (reply.usage.input_tokens, reply.usage.output_tokens) == (42, 7)
    assert sent["url"] == "https://llm.example.com/v1/chat/completions"
    assert sent["headers"] == {"Authorization": "Bearer sk-test"}
    assert sent["json"]["response_format"] == {"type": "json_object"}


def test_transport_errors(backend, monkeypatch):
    reply_with(monkeypatch, requests.exceptions.ConnectionError("refused"))
    with pytest.raises(BackendUnavailable, match="refused"):
        backend.complete(CALL, 1, [])


def test_http_errors(backend, monkeypatch):
    reply_with(monkeypatch, FakeResponse({}, status=503))
    with pytest.raises(BackendUnavailable, match="503"):
        backend.complete(CALL, 1, [])


def test_unexpected_payload(backend, monkeypatch):
    reply_with(monkeypatch, FakeResponse({"choices": []}))
    with pytest.raises(BackendUnavailable, match="Unexpected"):
        backend.complete(CALL, 1, [])
