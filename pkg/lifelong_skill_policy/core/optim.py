import numpy as np


class AdamW:
    """Adaptive-moment optimizer with decoupled weight decay.

    Moments and step counts are kept per parameter name. Frozen or
    non-trainable parameters are skipped entirely, and elements outside a
    parameter's `trainable_mask` keep their exact previous value.
    """

    def __init__(
        self,
        named_parameters,
        lr=1e-4,
        weight_decay=1e-4,
        betas=(0.9, 0.999),
        eps=1e-8
    ):
        self.params = list(named_parameters)
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.state = {}

    def zero_grad(self):
        for _, p in self.params:
            p.zero_grad()

    def step(self):
        for name, p in self.params:
            if not p.trainable or p.frozen:
                continue
            if name not in self.state:
                self.state[name] = {
                    'step': 0,
                    'm': np.zeros_like(p.data),
                    'v': np.zeros_like(p.data)
                }
            state = self.state[name]
            state['step'] += 1
            state['m'] = self.beta1 * state['m'] + (1 - self.beta1) * p.grad
            state['v'] = self.beta2 * state['v'] + (1 - self.beta2) * p.grad * p.grad
            m_hat = state['m'] / (1 - self.beta1 ** state['step'])
            v_hat = state['v'] / (1 - self.beta2 ** state['step'])

            value = p.data * (1 - self.lr * self.weight_decay) \
                - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            if p.trainable_mask is not None:
                value = np.where(p.trainable_mask, value, p.data)
            p.data = value


def optimizer_step(optimizer):
    """Apply one update from the populated gradients, then clear them."""
    optimizer.step()
    optimizer.zero_grad()
