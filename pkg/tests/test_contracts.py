"""Protocol contracts: identity gate, tokenization, tokens, router, exchange."""

import random

import pytest

from medsim.clock import LogicalClock
from medsim.contracts import deploy_protocol
from medsim.contracts.exchange import (
    REASON_ALLOWANCE,
    REASON_CONSUMER_VC,
    REASON_PROVIDER_VC,
    REASON_WRONG_AMOUNT,
)
from medsim.scp import Chain
from medsim.units import ONE_TOKEN
from medsim.wallet import Wallet

T0 = 1_700_000_000
YEAR = 365 * 24 * 3600


class Deployment:
    """In-process protocol deployment with direct admin access for tests."""

    def __init__(self, start=T0):
        self.clock = LogicalClock(start)
        self.chain = Chain(clock=self.clock)
        self.issuer = Wallet.generate(wallet_seed=(0x155).to_bytes(32, "big"))
        self.addresses = deploy_protocol(self.chain, self.issuer.eoa.hex, self.issuer.eoa.hex)
        self._vc_counter = 0

    def fund(self, wallet, amount):
        self.chain.genesis_alloc({wallet.eoa.hex: amount})

    def submit(self, wallet, contract, method, args, value="0"):
        tx = wallet.sign_transaction(contract, method, args, value=value)
        receipt = self.chain.submit(tx)
        if receipt.ok:
            wallet.note_applied(tx)
        return receipt

    def enroll(self, wallet, validity=YEAR):
        """Register a credential binding for a wallet, issuer-signed."""
        self._vc_counter += 1
        vc_id = f"urn:vc:test:{self._vc_counter}"
        now = self.clock.now()
        receipt = self.submit(self.issuer, self.addresses["identity"], "add_user", {
            "vc_id": vc_id, "eoa": wallet.eoa.hex,
            "issuance_date": now, "expiration_date": now + validity,
        })
        assert receipt.ok, receipt.error
        return vc_id

    def has_valid_status(self, wallet):
        return self.chain.call_static(self.addresses["identity"], "has_valid_status", {"eoa": wallet.eoa.hex})

    def tokenize(self, provider, alias="svc", supply=3 * ONE_TOKEN, price=2 * ONE_TOKEN):
        receipt = self.submit(provider, self.addresses["factory"], "tokenize", {
            "alias": alias, "cid": "sha256-" + "00" * 32,
            "service_url": f"http://connector.local/services/{alias}/payload",
            "at_supply": str(supply), "price": str(price),
        })
        return receipt


@pytest.fixture
def dep():
    return Deployment()


@pytest.fixture
def provider(dep):
    wallet = Wallet.generate(wallet_seed=(0x100).to_bytes(32, "big"))
    dep.fund(wallet, 10 * ONE_TOKEN)
    return wallet


@pytest.fixture
def consumer(dep):
    wallet = Wallet.generate(wallet_seed=(0x200).to_bytes(32, "big"))
    dep.fund(wallet, 10 * ONE_TOKEN)
    return wallet


class TestIdentityContract:
    def test_add_then_valid_within_window(self, dep, provider):
        dep.enroll(provider)
        assert dep.has_valid_status(provider)

    def test_unknown_eoa_is_invalid(self, dep, provider):
        assert not dep.has_valid_status(provider)

    def test_expired_is_invalid(self, dep, provider):
        dep.enroll(provider, validity=100)
        dep.clock.advance(101)
        assert not dep.has_valid_status(provider)

    def test_window_bounds_are_inclusive(self, dep, provider):
        dep.enroll(provider, validity=100)
        dep.clock.advance(100)
        assert dep.has_valid_status(provider)
        dep.clock.advance(1)
        assert not dep.has_valid_status(provider)

    def test_non_issuer_add_reverts(self, dep, provider, consumer):
        receipt = dep.submit(provider, dep.addresses["identity"], "add_user", {
            "vc_id": "urn:vc:test:evil", "eoa": consumer.eoa.hex,
            "issuance_date": 1, "expiration_date": 2,
        })
        assert receipt.status == "reverted"

    def test_second_binding_for_same_eoa_reverts(self, dep, provider):
        dep.enroll(provider)
        receipt = dep.submit(dep.issuer, dep.addresses["identity"], "add_user", {
            "vc_id": "urn:vc:test:dup", "eoa": provider.eoa.hex,
            "issuance_date": 1, "expiration_date": 2**40,
        })
        assert receipt.status == "reverted"

    def test_inverted_dates_revert(self, dep, provider):
        receipt = dep.submit(dep.issuer, dep.addresses["identity"], "add_user", {
            "vc_id": "urn:vc:test:x", "eoa": provider.eoa.hex,
            "issuance_date": 10, "expiration_date": 10,
        })
        assert receipt.status == "reverted"

    def test_revocation(self, dep, provider):
        vc_id = dep.enroll(provider)
        identity = dep.addresses["identity"]
        assert dep.chain.call_static(identity, "is_revoked", {"vc_id": vc_id}) is False
        receipt = dep.submit(dep.issuer, identity, "revoke", {"vc_id": vc_id})
        assert receipt.ok
        assert dep.chain.call_static(identity, "is_revoked", {"vc_id": vc_id}) is True
        assert not dep.has_valid_status(provider)
        # revoking again is an idempotent success
        assert dep.submit(dep.issuer, identity, "revoke", {"vc_id": vc_id}).ok

    def test_unknown_vc_id_reads_as_revoked(self, dep):
        assert dep.chain.call_static(dep.addresses["identity"], "is_revoked", {"vc_id": "urn:nope"}) is True

    def test_revoke_by_stranger_reverts(self, dep, provider):
        vc_id = dep.enroll(provider)
        receipt = dep.submit(provider, dep.addresses["identity"], "revoke", {"vc_id": vc_id})
        assert receipt.status == "reverted"

    def test_gate_agrees_with_predicate_over_random_schedule(self, dep):
        """Randomized add/revoke/advance schedule versus a replayed oracle."""
        rng = random.Random(2024)
        identity = dep.addresses["identity"]
        wallets = [Wallet.generate(wallet_seed=(1000 + i).to_bytes(32, "big")) for i in range(8)]
        log = []  # (op, *details)
        for step in range(400):
            roll = rng.random()
            wallet = rng.choice(wallets)
            if roll < 0.35:
                validity = rng.randrange(50, 5000)
                vc_id = f"urn:vc:sched:{step}"
                receipt = dep.submit(dep.issuer, identity, "add_user", {
                    "vc_id": vc_id, "eoa": wallet.eoa.hex,
                    "issuance_date": dep.clock.now(),
                    "expiration_date": dep.clock.now() + validity,
                })
                if receipt.ok:
                    log.append(("add", wallet.eoa.hex, vc_id, dep.clock.now(), dep.clock.now() + validity))
            elif roll < 0.55:
                bound = [e for e in log if e[0] == "add"]
                if bound:
                    vc_id = rng.choice(bound)[2]
                    if dep.submit(dep.issuer, identity, "revoke", {"vc_id": vc_id}).ok:
                        log.append(("revoke", vc_id))
            elif roll < 0.75:
                dep.clock.advance(rng.randrange(1, 700))
                log.append(("advance", dep.clock.now()))
            else:
                # oracle replay: latest binding per eoa, revocations applied
                now = dep.clock.now()
                bindings = {}
                revoked = set()
                for entry in log:
                    if entry[0] == "add":
                        bindings[entry[1]] = (entry[2], entry[3], entry[4])
                    elif entry[0] == "revoke":
                        revoked.add(entry[1])
                for w in wallets:
                    record = bindings.get(w.eoa.hex)
                    expect = (
                        record is not None
                        and record[0] not in revoked
                        and record[1] <= now <= record[2]
                    )
                    assert dep.has_valid_status(w) == expect


class TestFactory:
    def test_member_tokenizes(self, dep, provider):
        dep.enroll(provider)
        receipt = dep.tokenize(provider, supply=5 * ONE_TOKEN)
        assert receipt.ok, receipt.error
        assert [e.name for e in receipt.events if e.name == "ServiceTokenized"]
        offerings = dep.chain.call_static(dep.addresses["factory"], "list_offerings", {})
        assert len(offerings) == 1
        at = receipt.result["access_token_contract"]
        assert dep.chain.call_static(at, "balance_of", {"owner": provider.eoa.hex}) == 5 * ONE_TOKEN

    def test_nonmember_tokenize_reverts_and_deploys_nothing(self, dep, provider):
        contracts_before = set(dep.chain.contracts)
        receipt = dep.tokenize(provider)
        assert receipt.status == "reverted"
        assert set(dep.chain.contracts) == contracts_before
        assert dep.chain.call_static(dep.addresses["factory"], "list_offerings", {}) == []

    def test_revoked_member_tokenize_reverts(self, dep, provider):
        vc_id = dep.enroll(provider)
        dep.submit(dep.issuer, dep.addresses["identity"], "revoke", {"vc_id": vc_id})
        assert dep.tokenize(provider).status == "reverted"

    def test_two_tokenizations_distinct_addresses(self, dep, provider):
        dep.enroll(provider)
        a = dep.tokenize(provider, alias="one")
        b = dep.tokenize(provider, alias="two")
        assert a.ok and b.ok
        assert a.result["service_contract"] != b.result["service_contract"]

    def test_empty_registry_at_genesis(self, dep):
        assert dep.chain.call_static(dep.addresses["factory"], "list_offerings", {}) == []

    def test_supply_below_one_token_reverts(self, dep, provider):
        dep.enroll(provider)
        assert dep.tokenize(provider, supply=ONE_TOKEN - 1).status == "reverted"

    def test_ownership_and_metadata(self, dep, provider, consumer):
        dep.enroll(provider)
        receipt = dep.tokenize(provider, alias="meta")
        service = receipt.result["service_contract"]
        assert dep.chain.call_static(service, "owner", {}) == provider.eoa.hex
        metadata = dep.chain.call_static(service, "metadata", {})
        assert metadata["alias"] == "meta"
        assert metadata["cid"].startswith("sha256-")
        transfer = dep.submit(provider, service, "transfer_ownership", {"new_owner": consumer.eoa.hex})
        assert transfer.ok
        assert dep.chain.call_static(service, "owner", {}) == consumer.eoa.hex


class TestAccessToken:
    @pytest.fixture
    def token(self, dep, provider):
        dep.enroll(provider)
        receipt = dep.tokenize(provider, supply=5 * ONE_TOKEN)
        return receipt.result["access_token_contract"]

    def test_transfer_conserves_supply(self, dep, provider, consumer, token):
        supply = dep.chain.call_static(token, "total_supply", {})
        receipt = dep.submit(provider, token, "transfer", {"to": consumer.eoa.hex, "amount": str(ONE_TOKEN)})
        assert receipt.ok
        balances = [
            dep.chain.call_static(token, "balance_of", {"owner": w.eoa.hex})
            for w in (provider, consumer)
        ]
        assert sum(balances) == supply == dep.chain.call_static(token, "total_supply", {})

    def test_transfer_over_balance_reverts(self, dep, consumer, token):
        receipt = dep.submit(consumer, token, "transfer", {"to": "0x" + "22" * 20, "amount": str(ONE_TOKEN)})
        assert receipt.status == "reverted"

    def test_transfer_from_above_allowance_reverts(self, dep, provider, consumer, token):
        receipt = dep.submit(consumer, token, "transfer_from", {
            "owner": provider.eoa.hex, "to": consumer.eoa.hex, "amount": str(ONE_TOKEN),
        })
        assert receipt.status == "reverted"

    def test_approve_overwrites_previous_grant(self, dep, provider, consumer, token):
        # sequence test for replace (not accumulate) semantics
        dep.submit(provider, token, "approve", {"spender": consumer.eoa.hex, "amount": str(3 * ONE_TOKEN)})
        dep.submit(provider, token, "approve", {"spender": consumer.eoa.hex, "amount": str(ONE_TOKEN)})
        allowance = dep.chain.call_static(token, "allowance", {
            "owner": provider.eoa.hex, "spender": consumer.eoa.hex,
        })
        assert allowance == ONE_TOKEN
        receipt = dep.submit(consumer, token, "transfer_from", {
            "owner": provider.eoa.hex, "to": consumer.eoa.hex, "amount": str(2 * ONE_TOKEN),
        })
        assert receipt.status == "reverted"

    def test_mint_and_burn_owner_only(self, dep, provider, consumer, token):
        assert dep.submit(provider, token, "mint", {"amount": str(ONE_TOKEN)}).ok
        assert dep.chain.call_static(token, "total_supply", {}) == 6 * ONE_TOKEN
        assert dep.submit(consumer, token, "mint", {"amount": str(ONE_TOKEN)}).status == "reverted"
        assert dep.submit(provider, token, "burn", {"amount": str(7 * ONE_TOKEN)}).status == "reverted"
        assert dep.submit(provider, token, "burn", {"amount": str(2 * ONE_TOKEN)}).ok
        assert dep.chain.call_static(token, "total_supply", {}) == 4 * ONE_TOKEN


class TestRouter:
    def test_genesis_listing_contains_fixed_rate_exchange(self, dep):
        assert dep.chain.call_static(dep.addresses["router"], "list", {}) == [dep.addresses["exchange"]]

    def test_add_remove_by_admin(self, dep):
        router = dep.addresses["router"]
        other = "0x" + "ab" * 20
        assert dep.submit(dep.issuer, router, "add_exchange", {"address": other}).ok
        assert other in dep.chain.call_static(router, "list", {})
        assert dep.submit(dep.issuer, router, "add_exchange", {"address": other}).status == "reverted"
        assert dep.submit(dep.issuer, router, "remove_exchange", {"address": other}).ok
        assert dep.submit(dep.issuer, router, "remove_exchange", {"address": other}).status == "reverted"

    def test_non_admin_add_reverts(self, dep, provider):
        receipt = dep.submit(provider, dep.addresses["router"], "add_exchange", {"address": "0x" + "cd" * 20})
        assert receipt.status == "reverted"


class TestExchange:
    @pytest.fixture
    def offering(self, dep, provider, consumer):
        dep.enroll(provider)
        dep.enroll(consumer)
        receipt = dep.tokenize(provider, supply=2 * ONE_TOKEN, price=3 * ONE_TOKEN)
        return receipt.result

    def buy(self, dep, consumer, offering, value):
        return dep.submit(
            consumer, dep.addresses["exchange"], "buy",
            {"service": offering["service_contract"]}, value=value,
        )

    def test_happy_path_moves_price_and_one_token(self, dep, provider, consumer, offering):
        price = 3 * ONE_TOKEN
        native_before = {w.eoa.hex: dep.chain.balances[w.eoa.hex] for w in (provider, consumer)}
        receipt = self.buy(dep, consumer, offering, value=price)
        assert receipt.ok, receipt.error
        assert dep.chain.balances[consumer.eoa.hex] == native_before[consumer.eoa.hex] - price
        assert dep.chain.balances[provider.eoa.hex] == native_before[provider.eoa.hex] + price
        token = offering["access_token_contract"]
        assert dep.chain.call_static(token, "balance_of", {"owner": consumer.eoa.hex}) == ONE_TOKEN
        assert dep.chain.call_static(token, "balance_of", {"owner": provider.eoa.hex}) == ONE_TOKEN
        assert any(e.name == "AccessPurchased" for e in receipt.events)

    def test_underpay_reverts_atomically(self, dep, provider, consumer, offering):
        pre = dep.chain.state_hash()
        receipt = self.buy(dep, consumer, offering, value=3 * ONE_TOKEN - 1)
        assert receipt.status == "reverted"
        assert receipt.error == REASON_WRONG_AMOUNT
        assert dep.chain.state_hash() == pre

    def test_overpay_reverts(self, dep, consumer, offering):
        receipt = self.buy(dep, consumer, offering, value=3 * ONE_TOKEN + 1)
        assert receipt.status == "reverted"
        assert receipt.error == REASON_WRONG_AMOUNT

    def test_revoked_provider_blocks_sale(self, dep, provider, consumer, offering):
        vc_id = dep.chain.call_static(dep.addresses["identity"], "status_of", {"eoa": provider.eoa.hex})["vc_id"]
        dep.submit(dep.issuer, dep.addresses["identity"], "revoke", {"vc_id": vc_id})
        pre = dep.chain.state_hash()
        receipt = self.buy(dep, consumer, offering, value=3 * ONE_TOKEN)
        assert receipt.status == "reverted"
        assert receipt.error == REASON_PROVIDER_VC
        assert dep.chain.state_hash() == pre

    def test_revoked_consumer_blocks_sale(self, dep, provider, consumer, offering):
        vc_id = dep.chain.call_static(dep.addresses["identity"], "status_of", {"eoa": consumer.eoa.hex})["vc_id"]
        dep.submit(dep.issuer, dep.addresses["identity"], "revoke", {"vc_id": vc_id})
        receipt = self.buy(dep, consumer, offering, value=3 * ONE_TOKEN)
        assert receipt.status == "reverted"
        assert receipt.error == REASON_CONSUMER_VC

    def test_allowance_exhaustion(self, dep, provider, consumer):
        # supply 2 AT: two sales succeed, the third finds no stock.
        # all funding happens before the first transaction seals genesis
        extra = Wallet.generate(wallet_seed=(0x300).to_bytes(32, "big"))
        straggler = Wallet.generate(wallet_seed=(0x400).to_bytes(32, "big"))
        dep.fund(extra, 10 * ONE_TOKEN)
        dep.fund(straggler, 10 * ONE_TOKEN)
        for wallet in (provider, consumer, extra, straggler):
            dep.enroll(wallet)
        offering = dep.tokenize(provider, supply=2 * ONE_TOKEN, price=3 * ONE_TOKEN).result
        assert self.buy(dep, consumer, offering, value=3 * ONE_TOKEN).ok
        assert self.buy(dep, extra, offering, value=3 * ONE_TOKEN).ok
        receipt = self.buy(dep, straggler, offering, value=3 * ONE_TOKEN)
        assert receipt.status == "reverted"
        assert receipt.error == REASON_ALLOWANCE

    def test_proof_of_purchase_follows_token_balance(self, dep, provider, consumer, offering):
        service = offering["service_contract"]
        token = offering["access_token_contract"]
        check = lambda: dep.chain.call_static(service, "verify_proof_of_purchase", {"consumer": consumer.eoa.hex})
        assert check() is False
        assert self.buy(dep, consumer, offering, value=3 * ONE_TOKEN).ok
        assert check() is True
        # transferring the token away forfeits the proof
        receipt = dep.submit(consumer, token, "transfer", {"to": "0x" + "77" * 20, "amount": str(ONE_TOKEN)})
        assert receipt.ok
        assert check() is False

    def test_expired_consumer_blocks_sale(self, dep, provider):
        shortlived = Wallet.generate(wallet_seed=(0x500).to_bytes(32, "big"))
        dep.fund(shortlived, 10 * ONE_TOKEN)
        dep.enroll(provider)
        dep.enroll(shortlived, validity=50)
        offering = dep.tokenize(provider, price=ONE_TOKEN).result
        dep.clock.advance(51)
        receipt = dep.submit(
            shortlived, dep.addresses["exchange"], "buy",
            {"service": offering["service_contract"]}, value=ONE_TOKEN,
        )
        assert receipt.status == "reverted"
        assert receipt.error == REASON_CONSUMER_VC

    def test_native_conservation_across_mixed_sequence(self, dep, provider, consumer, offering):
        total = dep.chain.total_native_supply()
        self.buy(dep, consumer, offering, value=3 * ONE_TOKEN)
        self.buy(dep, consumer, offering, value=1)
        self.buy(dep, consumer, offering, value=3 * ONE_TOKEN)
        assert dep.chain.total_native_supply() == total
