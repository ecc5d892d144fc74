import tensorflow as tf

labels = tf.constant([[1.0, 0.0]])
logits = tf.Variable([[0.2, 0.8]])
optimizer = tf.train.AdamOptimizer(0.01)

sess = tf.Session()
for epoch in range(50):
    loss = tf.nn.softmax_cross_entropy_with_logits(labels=labels, logits=logits)  # expect: RNC001
    sess.run(optimizer.minimize(loss))  # expect: RNC001
